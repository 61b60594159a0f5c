#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace treelab {

// Worker count used by all parallel loops. Changing it never changes results:
// loops only write to disjoint indices and reductions run over fixed-size
// blocks combined in index order.
void set_worker_count(int n);
int worker_count();

// Calls body(begin, end) over a static partition of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 1024);

// Sum of f(i) over [0, n) with a block structure that does not depend on
// the worker count.
double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& f);

}  // namespace treelab
