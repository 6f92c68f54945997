#include "gahf/initial_data.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gahf/error.hpp"

namespace gahf {

namespace {

Mat3 spatial_identity(int dim) {
  Mat3 d = Mat3::Zero();
  for (int a = 0; a < dim; ++a) d(a, a) = 1.0;
  return d;
}

Vec3 spatial(const Vec3& x, int dim) {
  Vec3 y = x;
  for (int a = dim; a < 3; ++a) y[a] = 0.0;
  return y;
}

/// g = psi^4 delta on the active block, g(2,2) = 1 in 2D.
DataSample conformal_sample(double psi, const Vec3& grad, int dim) {
  DataSample s;
  const double psi3 = psi * psi * psi;
  const Mat3 id = spatial_identity(dim);
  s.g = psi3 * psi * id;
  if (dim == 2) s.g(2, 2) = 1.0;
  for (int k = 0; k < dim; ++k) s.dg[k] = 4.0 * psi3 * grad[k] * id;
  return s;
}

class FlatSource final : public DataSource {
 public:
  explicit FlatSource(int dim) : dim_(dim) {}
  DataSample sample(const Vec3&) const override {
    (void)dim_;
    return DataSample{};
  }

 private:
  int dim_;
};

class PunctureSource final : public DataSource {
 public:
  PunctureSource(std::vector<PointMass> punctures, int dim)
      : punctures_(std::move(punctures)), dim_(dim) {}

  DataSample sample(const Vec3& x) const override {
    double psi = 1.0;
    Vec3 grad = Vec3::Zero();
    for (const auto& pm : punctures_) {
      const Vec3 d = spatial(x - pm.center, dim_);
      const double r = d.norm();
      if (r < 1e-12) fail(ErrorKind::Domain, "evaluation at a puncture");
      psi += pm.mass / (2.0 * r);
      grad -= pm.mass / (2.0 * r * r * r) * d;
    }
    return conformal_sample(psi, grad, dim_);
  }

 private:
  std::vector<PointMass> punctures_;
  int dim_;
};

class CustomConformalSource final : public DataSource {
 public:
  CustomConformalSource(std::function<double(const Vec3&)> psi,
                        std::function<Vec3(const Vec3&)> grad, int dim)
      : psi_(std::move(psi)), grad_(std::move(grad)), dim_(dim) {}

  DataSample sample(const Vec3& x) const override {
    return conformal_sample(psi_(x), spatial(grad_(x), dim_), dim_);
  }

 private:
  std::function<double(const Vec3&)> psi_;
  std::function<Vec3(const Vec3&)> grad_;
  int dim_;
};

class PainleveGullstrandSource final : public DataSource {
 public:
  PainleveGullstrandSource(std::vector<PointMass> sources, double sign, int dim)
      : sources_(std::move(sources)), sign_(sign), dim_(dim) {}

  DataSample sample(const Vec3& x) const override {
    DataSample s;
    const Mat3 id = spatial_identity(dim_);
    for (const auto& pm : sources_) {
      const Vec3 d = spatial(x - pm.center, dim_);
      const double r2 = d.squaredNorm();
      const double r = std::sqrt(r2);
      if (r < 1e-12) fail(ErrorKind::Domain, "evaluation at the Painleve-Gullstrand centre");
      const double a = sign_ * std::sqrt(2.0 * pm.mass / (r2 * r));
      const Mat3 nn = d * d.transpose() / r2;
      const Mat3 shape = id - 1.5 * nn;
      s.p += a * shape;
      for (int l = 0; l < dim_; ++l) {
        const double da = -1.5 * a * d[l] / r2;
        Mat3 dnn = Mat3::Zero();
        for (int i = 0; i < dim_; ++i)
          for (int j = 0; j < dim_; ++j)
            dnn(i, j) = ((i == l ? d[j] : 0.0) + (j == l ? d[i] : 0.0)) / r2 -
                        2.0 * d[i] * d[j] * d[l] / (r2 * r2);
        s.dp[l] += da * shape - 1.5 * a * dnn;
      }
    }
    return s;
  }

 private:
  std::vector<PointMass> sources_;
  double sign_;
  int dim_;
};

}  // namespace

bool Box::contains(const Vec3& x, int dim, double slack) const {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lo[a] - slack || x[a] > hi[a] + slack) return false;
  return true;
}

AnalyticFamily AnalyticFamily::flat() { return {}; }

AnalyticFamily AnalyticFamily::isotropic_schwarzschild(double mass) {
  AnalyticFamily f;
  f.tag = FamilyTag::IsotropicSchwarzschild;
  f.sources = {{mass, Vec3::Zero()}};
  return f;
}

AnalyticFamily AnalyticFamily::painleve_gullstrand(double mass) {
  return painleve_gullstrand(std::vector<PointMass>{{mass, Vec3::Zero()}});
}

AnalyticFamily AnalyticFamily::painleve_gullstrand(std::vector<PointMass> sources) {
  AnalyticFamily f;
  f.tag = FamilyTag::PainleveGullstrand;
  f.sources = std::move(sources);
  return f;
}

AnalyticFamily AnalyticFamily::brill_lindquist(double m1, double m2, double separation) {
  AnalyticFamily f;
  f.tag = FamilyTag::BrillLindquist;
  f.sources = {{m1, Vec3(-0.5 * separation, 0.0, 0.0)}, {m2, Vec3(0.5 * separation, 0.0, 0.0)}};
  if (!(separation > 0.0)) f.sources[1].center = f.sources[0].center;  // rejected by validate
  return f;
}

AnalyticFamily AnalyticFamily::conformally_flat(std::function<double(const Vec3&)> psi,
                                                std::function<Vec3(const Vec3&)> grad_psi) {
  AnalyticFamily f;
  f.tag = FamilyTag::ConformallyFlatCustom;
  f.psi = std::move(psi);
  f.grad_psi = std::move(grad_psi);
  return f;
}

void AnalyticFamily::validate() const {
  for (const auto& s : sources)
    if (!(s.mass > 0.0)) fail(ErrorKind::Parameter, "family masses must be positive");
  if (tag == FamilyTag::BrillLindquist) {
    if (sources.size() != 2 || !((sources[1].center - sources[0].center).norm() > 0.0))
      fail(ErrorKind::Parameter, "Brill-Lindquist separation must be positive");
  }
  if (tag == FamilyTag::ConformallyFlatCustom && (!psi || !grad_psi))
    fail(ErrorKind::Parameter, "custom conformal family needs psi and grad_psi");
  if (tag != FamilyTag::Flat && tag != FamilyTag::ConformallyFlatCustom && sources.empty())
    fail(ErrorKind::Parameter, "family needs at least one mass");
}

std::string AnalyticFamily::name() const {
  switch (tag) {
    case FamilyTag::Flat: return "flat";
    case FamilyTag::IsotropicSchwarzschild: return "isotropic-schwarzschild";
    case FamilyTag::PainleveGullstrand: return "painleve-gullstrand";
    case FamilyTag::BrillLindquist: return "brill-lindquist";
    case FamilyTag::ConformallyFlatCustom: return "conformally-flat-custom";
  }
  return "unknown";
}

std::shared_ptr<const DataSource> make_source(const AnalyticFamily& family, int dim) {
  family.validate();
  switch (family.tag) {
    case FamilyTag::Flat: return std::make_shared<FlatSource>(dim);
    case FamilyTag::IsotropicSchwarzschild:
    case FamilyTag::BrillLindquist:
      return std::make_shared<PunctureSource>(family.sources, dim);
    case FamilyTag::PainleveGullstrand:
      return std::make_shared<PainleveGullstrandSource>(family.sources, family.p_sign, dim);
    case FamilyTag::ConformallyFlatCustom:
      return std::make_shared<CustomConformalSource>(family.psi, family.grad_psi, dim);
  }
  fail(ErrorKind::Parameter, "unknown family");
}

InitialDataSet::InitialDataSet(int dim, std::shared_ptr<const DataSource> source, Box bounds,
                               std::string description)
    : dim_(dim), source_(std::move(source)), bounds_(bounds), description_(std::move(description)) {
  if (dim_ < 2 || dim_ > 7) fail(ErrorKind::Parameter, "dimension must satisfy 2 <= n <= 7");
  if (dim_ > 3) fail(ErrorKind::Parameter, "only n = 2 and n = 3 are discretized");
}

InitialDataSet InitialDataSet::from_family(const AnalyticFamily& family, int dim, const Box& bounds) {
  return InitialDataSet(dim, make_source(family, dim), bounds, family.name());
}

DataSample InitialDataSet::evaluate(const Vec3& x) const {
  if (!bounds_.contains(x, dim_)) {
    std::ostringstream msg;
    msg << "point (" << x.transpose() << ") outside the declared box";
    fail(ErrorKind::Domain, msg.str());
  }
  DataSample s = source_->sample(x);
  const double scale = 1.0 + s.g.cwiseAbs().maxCoeff();
  if ((s.g - s.g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorKind::Data, "metric is not symmetric");
  if ((s.p - s.p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + s.p.cwiseAbs().maxCoeff()))
    fail(ErrorKind::Data, "p is not symmetric");
  if (!s.g.allFinite() || !s.p.allFinite()) fail(ErrorKind::Data, "non-finite data");
  Eigen::LLT<Eigen::MatrixXd> llt(s.g.topLeftCorner(dim_, dim_));
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "metric is not positive definite at (" << x.transpose() << ")";
    fail(ErrorKind::Data, msg.str());
  }
  return s;
}

double tensor_norm(const Mat3& g, const Mat3& p, int dim) {
  const Eigen::MatrixXd gd = g.topLeftCorner(dim, dim);
  const Eigen::MatrixXd pd = p.topLeftCorner(dim, dim);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pd, gd, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Christoffel christoffel(const DataSample& s, int dim) {
  const Mat3 ginv = s.g.inverse();
  Christoffel gam{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double v = 0.0;
        for (int l = 0; l < dim; ++l) v += ginv(k, l) * (s.dg[i](j, l) + s.dg[j](i, l) - s.dg[l](i, j));
        gam[k](i, j) = 0.5 * v;
      }
  return gam;
}

}  // namespace gahf
