#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace graphda {

using Index = Eigen::Index;

// Base for every failure raised by the library. Argument errors (bad sizes,
// out-of-range parameters) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Normalized Laplacian requested on a graph with a zero-degree node.
class IsolatedNode : public Error {
 public:
  explicit IsolatedNode(Index node)
      : Error("isolated node " + std::to_string(node)), node_(node) {}
  Index node() const noexcept { return node_; }

 private:
  Index node_;
};

// Error carrying a list of offending node indices.
class NodeSetError : public Error {
 public:
  NodeSetError(const std::string& what, std::vector<Index> nodes)
      : Error(what + describe(nodes)), nodes_(std::move(nodes)) {}
  const std::vector<Index>& nodes() const noexcept { return nodes_; }

 private:
  static std::string describe(const std::vector<Index>& nodes) {
    std::string s = " (" + std::to_string(nodes.size()) + " nodes:";
    const std::size_t shown = nodes.size() < 8 ? nodes.size() : 8;
    for (std::size_t i = 0; i < shown; ++i) s += " " + std::to_string(nodes[i]);
    if (shown < nodes.size()) s += " ...";
    return s + ")";
  }
  std::vector<Index> nodes_;
};

// A connected component of a graph contains no labeled node.
class DisconnectedComponent : public NodeSetError {
 public:
  DisconnectedComponent(const std::string& domain, std::vector<Index> nodes)
      : NodeSetError(domain + " graph has a component without labels", std::move(nodes)),
        domain_(domain) {}
  const std::string& domain() const noexcept { return domain_; }

 private:
  std::string domain_;
};

// Nodes not reachable from the labeled set during layer decomposition.
class UnreachableNodes : public NodeSetError {
 public:
  explicit UnreachableNodes(std::vector<Index> nodes)
      : NodeSetError("nodes unreachable from the labeled set", std::move(nodes)) {}
};

// The weight LP had no feasible point; nodes lists the violated degree rows.
class InfeasibleWeights : public NodeSetError {
 public:
  explicit InfeasibleWeights(std::vector<Index> nodes)
      : NodeSetError("weight LP infeasible", std::move(nodes)) {}
};

// Coefficient system too ill-conditioned to solve reliably.
class SingularSystem : public Error {
 public:
  explicit SingularSystem(double condition)
      : Error("coefficient system is numerically singular (condition estimate " +
              std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& detail)
      : Error(file + ":" + std::to_string(line) + ": " + detail), file_(file), line_(line) {}
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(Index index, Index size)
      : Error("index " + std::to_string(index) + " out of range [0, " + std::to_string(size) + ")"),
        index_(index) {}
  Index index() const noexcept { return index_; }

 private:
  Index index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphda
