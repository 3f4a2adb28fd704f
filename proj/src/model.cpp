#include "ceo/model.hpp"

#include <cmath>
#include <sstream>

namespace ceo {

namespace {

bool shape_ok(const ProblemInstance& in, std::vector<Violation>* out) {
  bool ok = true;
  auto flag = [&](const std::string& msg) {
    out->push_back({"shape", msg});
    ok = false;
  };
  if (in.m <= 0) flag("m must be a positive integer");
  if (in.L <= 0) flag("L must be a positive integer");
  if (in.K.rows() != in.m || in.K.cols() != in.m)
    flag("K is not m x m");
  if (static_cast<int>(in.Sigma.size()) != in.L)
    flag("Sigma must hold L matrices");
  for (int i = 0; i < static_cast<int>(in.Sigma.size()); ++i) {
    if (in.Sigma[i].rows() != in.m || in.Sigma[i].cols() != in.m) {
      std::ostringstream os;
      os << "Sigma[" << i << "] is not m x m";
      flag(os.str());
    }
  }
  if (in.mu.size() != in.L) flag("mu must hold L weights");
  return ok;
}

}  // namespace

std::pair<double, double> d_bounds(const ProblemInstance& instance) {
  Matrix precision = spd_inverse(instance.K, "d_bounds: K");
  for (int i = 0; i < instance.L; ++i) {
    precision += spd_inverse(instance.Sigma[i], "d_bounds: Sigma");
  }
  const double d_min =
      spd_inverse(precision, "d_bounds: total precision").trace();
  return {d_min, instance.K.trace()};
}

ValidationReport validate(const ProblemInstance& instance) {
  ValidationReport report;
  auto& v = report.violations;

  if (!shape_ok(instance, &v)) {
    report.ok = false;
    return report;
  }

  auto check_matrix = [&](const Matrix& a, const std::string& name) {
    if (relative_asymmetry(a) > kSymRelTol) {
      v.push_back({"symmetry", name + " is not symmetric"});
      return false;
    }
    if (!is_spd(sym(a), kPdRelTol)) {
      v.push_back({"positive-definite", name + " is not positive definite"});
      return false;
    }
    return true;
  };

  bool pd_ok = check_matrix(instance.K, "K");
  for (int i = 0; i < instance.L; ++i) {
    std::ostringstream os;
    os << "Sigma[" << i << "]";
    pd_ok = check_matrix(instance.Sigma[i], os.str()) && pd_ok;
  }

  for (int i = 0; i < instance.L; ++i) {
    if (!(instance.mu[i] > 0.0)) {
      v.push_back({"weights", "weights must be strictly positive"});
      break;
    }
  }
  for (int i = 0; i + 1 < instance.L; ++i) {
    if (instance.mu[i] < instance.mu[i + 1]) {
      v.push_back({"weights", "weights not non-increasing"});
      break;
    }
  }

  if (pd_ok) {
    const auto [d_min, d_max] = d_bounds(instance);
    report.d_window = {d_min, d_max};
    if (!(instance.d > d_min)) {
      std::ostringstream os;
      os << "d <= d_min = " << d_min;
      v.push_back({"d-window", os.str()});
    }
    if (!(instance.d < d_max)) {
      std::ostringstream os;
      os << "d >= tr(K) = " << d_max;
      v.push_back({"d-window", os.str()});
    }
  } else if (!(instance.d > 0.0)) {
    v.push_back({"d-window", "d must be positive"});
  }

  report.ok = v.empty();
  return report;
}

void symmetrize_inputs(ProblemInstance& instance) {
  auto fix = [](Matrix& a) {
    const double asym = relative_asymmetry(a);
    if (asym > 0.0 && asym <= kSymRelTol) a = sym(a);
  };
  fix(instance.K);
  for (auto& s : instance.Sigma) fix(s);
}

}  // namespace ceo
