#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace ffnet {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration (bad file, unknown key, invalid value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent dataset / weights / result files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values encountered during training or inference.
class NumericError : public Error {
 public:
  using Error::Error;
};

// splitmix64 step; used to derive independent per-task seeds from a root seed.
std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream);

// Worker cap for parallel sections: FFAGENT_THREADS if set (>=1),
// otherwise hardware_concurrency.
unsigned max_worker_threads();

// Runs fn(0..n-1) on up to max_threads workers. Blocks until done.
// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned max_threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ffnet
