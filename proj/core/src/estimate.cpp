#include "asian/estimate.hpp"

namespace asian {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::AbsoluteBound: return "AbsoluteBound";
    case ErrorKind::StdDevBound: return "StdDevBound";
    case ErrorKind::Interval: return "Interval";
  }
  return "?";
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::StrongMC: return "StrongMC";
    case Method::BTT: return "BTT";
    case Method::RecBTT: return "RecBTT";
    case Method::BasketBTT: return "BasketBTT";
    case Method::Exact: return "Exact";
  }
  return "?";
}

std::string_view to_string(McBranch branch) noexcept {
  return branch == McBranch::DeepInMoney ? "DeepInMoney" : "Sampled";
}

std::string_view to_string(BaseSolver solver) noexcept {
  switch (solver) {
    case BaseSolver::BTT: return "BTT";
    case BaseSolver::Exact: return "Exact";
    case BaseSolver::StrongMC: return "StrongMC";
  }
  return "?";
}

}  // namespace asian
