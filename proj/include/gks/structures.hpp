#pragma once

// Linear generalized geometry on a single double space: generalized metrics,
// generalized complex structures, Hermitian pairs, the bigraded decomposition
// of forms and the generalized Hodge star.

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gks/exterior_clifford.hpp"

namespace gks {

inline constexpr double kAxiomTol = 1e-9;

namespace detail {

inline double rel(double residual, double scale) { return residual / std::max(1.0, scale); }

/// Gram-Schmidt for the (real) natural pairing with prescribed sign of <e,e>.
inline RMat pairing_gram_schmidt(const RMat& vectors, double sign) {
  const int m2 = static_cast<int>(vectors.rows());
  const RMat p = pairing_matrix(m2 / 2);
  RMat out = vectors;
  for (int i = 0; i < out.cols(); ++i) {
    for (int j = 0; j < i; ++j) {
      const double c = sign * out.col(j).dot(p * out.col(i));
      out.col(i) -= c * out.col(j);
    }
    const double nn = sign * out.col(i).dot(p * out.col(i));
    if (nn <= 0.0) throw AxiomViolation("frame is not definite for the natural pairing", nn);
    out.col(i) /= std::sqrt(nn);
  }
  return out;
}

/// Orthonormal basis (Euclidean) of the column span of x, expected rank `rank`.
inline CMat column_basis(const CMat& x, int rank, const char* what) {
  Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = 1e-8 * std::max(1.0, s(0));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  if (r != rank) throw AxiomViolation(std::string(what) + ": unexpected rank", std::abs(r - rank));
  return svd.matrixU().leftCols(rank);
}

/// Hermitian Gram-Schmidt with h(u, w) = sign * u^H P w.
inline CMat hermitian_gram_schmidt(const CMat& vectors, double sign) {
  const int m = static_cast<int>(vectors.rows()) / 2;
  const CMat p = pairing_matrix(m).cast<cplx>();
  CMat out = vectors;
  for (int i = 0; i < out.cols(); ++i) {
    for (int j = 0; j < i; ++j) {
      const cplx c = sign * (out.col(j).adjoint() * p * out.col(i))(0, 0);
      out.col(i) -= c * out.col(j);
    }
    const double nn = sign * (out.col(i).adjoint() * p * out.col(i))(0, 0).real();
    if (nn <= 0.0) throw AxiomViolation("Hermitian frame is not definite", nn);
    out.col(i) /= std::sqrt(nn);
  }
  return out;
}

/// Orientation (+1/-1) induced by a complex structure m (m x m real matrix,
/// m^2 = -1) relative to the standard orientation of R^m: sign of
/// det[u_1, m u_1, ..., u_n, m u_n].
inline int complex_orientation(const RMat& mj) {
  const auto dim = mj.rows();
  RMat basis(dim, 0);
  for (Eigen::Index i = 0; i < dim && basis.cols() < dim; ++i) {
    RMat trial(dim, basis.cols() + 2);
    trial << basis, RVec::Unit(dim, i), mj.col(i);
    Eigen::FullPivLU<RMat> lu(trial);
    if (lu.rank() == trial.cols()) basis = trial;
  }
  if (basis.cols() != dim) throw AxiomViolation("complex orientation: no complex basis found", 1.0);
  return basis.determinant() > 0 ? 1 : -1;
}

}  // namespace detail

class GeneralizedMetric {
 public:
  /// G with V+- the graphs of (b +- g) : V -> V*.
  static GeneralizedMetric from_g_b(const RMat& g, const RMat& b) {
    const auto m = g.rows();
    require_dim(g.cols() == m && b.rows() == m && b.cols() == m, "metric_from_g_b: g and b must be m x m");
    if (max_abs(RMat(g - g.transpose())) > kAxiomTol * std::max(1.0, max_abs(g)))
      throw AxiomViolation("g is not symmetric", max_abs(RMat(g - g.transpose())));
    if (max_abs(RMat(b + b.transpose())) > kAxiomTol * std::max(1.0, max_abs(b)))
      throw AxiomViolation("b is not skew", max_abs(RMat(b + b.transpose())));
    Eigen::SelfAdjointEigenSolver<RMat> es(g);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw AxiomViolation("g is not positive definite", es.eigenvalues().minCoeff());
    const RMat gi = g.inverse();
    RMat mat(2 * m, 2 * m);
    mat << -gi * b, gi, g - b * gi * b, b * gi;
    return GeneralizedMetric(mat, g, b);
  }

  /// Validate an explicit 2m x 2m matrix against the metric axioms.
  static GeneralizedMetric from_matrix(const RMat& mat) {
    const auto m = mat.rows() / 2;
    require_dim(mat.rows() == 2 * m && mat.cols() == 2 * m, "GeneralizedMetric: matrix must be 2m x 2m");
    const RMat gi = mat.topRightCorner(m, m);
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (gi + gi.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw AxiomViolation("generalized metric is not positive", es.eigenvalues().minCoeff());
    const RMat g = gi.inverse();
    const RMat b = -g * mat.topLeftCorner(m, m);
    GeneralizedMetric out(mat, 0.5 * (g + g.transpose()), 0.5 * (b - b.transpose()));
    if (out.axiom_residual() > kAxiomTol) throw AxiomViolation("generalized metric axioms", out.axiom_residual());
    return out;
  }

  int dim() const { return static_cast<int>(g_.rows()); }
  const RMat& matrix() const { return mat_; }
  const RMat& g() const { return g_; }
  const RMat& b() const { return b_; }
  /// Orthonormal frame of V+ (<e_i, e_j> = delta), positive for pi_V.
  const RMat& vplus_frame() const { return vplus_; }
  /// Frame of V- with <e_i, e_j> = -delta.
  const RMat& vminus_frame() const { return vminus_; }

  /// Largest violation of: G^2 = 1, orthogonality, self-adjointness.
  double axiom_residual() const {
    const auto n2 = mat_.rows();
    const RMat p = pairing_matrix(dim());
    const double sq = max_abs(RMat(mat_ * mat_ - RMat::Identity(n2, n2)));
    const double orth = max_abs(RMat(mat_.transpose() * p * mat_ - p));
    const double self = max_abs(RMat(p * mat_ - mat_.transpose() * p));
    return detail::rel(std::max({sq, orth, self}), max_abs(mat_));
  }
  /// Smallest eigenvalue of the symmetric form <G., .>.
  double positivity_margin() const {
    const RMat q = pairing_matrix(dim()) * mat_;
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (q + q.transpose()));
    return es.eigenvalues().minCoeff();
  }

 private:
  GeneralizedMetric(RMat mat, RMat g, RMat b) : mat_(std::move(mat)), g_(std::move(g)), b_(std::move(b)) {
    const auto m = g_.rows();
    RMat plus(2 * m, m), minus(2 * m, m);
    plus << RMat::Identity(m, m), b_ + g_;
    minus << RMat::Identity(m, m), b_ - g_;
    vplus_ = detail::pairing_gram_schmidt(plus, 1.0);
    vminus_ = detail::pairing_gram_schmidt(minus, -1.0);
  }

  RMat mat_, g_, b_, vplus_, vminus_;
};

/// Clifford element -e_m ... e_1 for an orthonormal frame of V+.
inline CMat star_from_frame(const RMat& frame) {
  const int m = static_cast<int>(frame.cols());
  CMat s = -CMat::Identity(spinor_size(m), spinor_size(m));
  for (int i = 0; i < m; ++i) s = clifford_matrix(m, frame.col(i).cast<cplx>()) * s;
  return s;
}

/// Generalized Hodge star as a matrix. `orientation` = +1 keeps the
/// orientation of V pulled back to V+; -1 reverses it.
inline CMat star_matrix(const GeneralizedMetric& metric, int orientation = 1) {
  const CMat s = star_from_frame(metric.vplus_frame());
  return orientation >= 0 ? s : CMat(-s);
}

inline Spinor hodge_star(const GeneralizedMetric& metric, int orientation, const Spinor& phi) {
  require_dim(metric.dim() == phi.dim(), "hodge_star: dimension mismatch");
  return {phi.dim(), star_matrix(metric, orientation) * phi.coeffs()};
}

/// Hodge star from a caller-supplied frame; the frame must be orthonormal in
/// V+ and positive for the requested orientation.
inline Spinor hodge_star(const GeneralizedMetric& metric, const RMat& frame, int orientation, const Spinor& phi) {
  const int m = metric.dim();
  require_dim(frame.rows() == 2 * m && frame.cols() == m, "hodge_star: frame must be 2m x m");
  const RMat p = pairing_matrix(m);
  const double ortho = max_abs(RMat(frame.transpose() * p * frame - RMat::Identity(m, m)));
  const double inside = max_abs(RMat(metric.matrix() * frame - frame));
  if (std::max(ortho, inside) > kAxiomTol) throw AxiomViolation("frame is not orthonormal in V+", std::max(ortho, inside));
  const double det = frame.topRows(m).determinant();
  if ((det > 0) != (orientation >= 0)) throw AxiomViolation("orientation-reversing frame supplied", det);
  return {m, star_from_frame(frame) * phi.coeffs()};
}

class GeneralizedComplexStructure {
 public:
  /// -J_V on V, J_V^* on V*.
  static GeneralizedComplexStructure from_complex_structure(const RMat& jv) {
    const auto m = jv.rows();
    RMat mat = RMat::Zero(2 * m, 2 * m);
    mat.topLeftCorner(m, m) = -jv;
    mat.bottomRightCorner(m, m) = jv.transpose();
    return from_matrix(mat);
  }

  /// omega(d_i, d_j) = omega_ij. With omega^flat(X) = i_X omega the structure
  /// is [[0, -omega^flat^-1], [omega^flat, 0]], which makes e^{i omega} span
  /// the top eigenspace.
  static GeneralizedComplexStructure from_symplectic(const RMat& omega) {
    const auto m = omega.rows();
    const RMat flat = omega.transpose();
    Eigen::FullPivLU<RMat> lu(flat);
    if (!lu.isInvertible()) throw AxiomViolation("omega is degenerate", 0.0);
    RMat mat = RMat::Zero(2 * m, 2 * m);
    mat.topRightCorner(m, m) = -lu.inverse();
    mat.bottomLeftCorner(m, m) = flat;
    return from_matrix(mat);
  }

  static GeneralizedComplexStructure from_matrix(const RMat& mat) { return GeneralizedComplexStructure(mat); }

  int dim() const { return m_; }
  int half_dim() const { return m_ / 2; }
  const RMat& matrix() const { return mat_; }
  SoDouble as_so() const { return {m_, mat_.cast<cplx>()}; }
  /// Basis of L, the +i eigenspace (2m x m).
  const CMat& l_frame() const { return l_frame_; }
  /// d_rho(J) on forms.
  const CMat& spin() const { return spin_; }
  /// Projector onto U^k, zero outside -n..n.
  CMat projector(int k) const {
    const int n = half_dim();
    if (k < -n || k > n) return CMat::Zero(spin_.rows(), spin_.cols());
    return projectors_[k + n];
  }
  /// Generator of the canonical line U^n.
  const Spinor& canonical() const { return canonical_; }

  double axiom_residual() const {
    const auto n2 = mat_.rows();
    const RMat p = pairing_matrix(m_);
    const double sq = max_abs(RMat(mat_ * mat_ + RMat::Identity(n2, n2)));
    const double orth = max_abs(RMat(mat_.transpose() * p * mat_ - p));
    return detail::rel(std::max(sq, orth), max_abs(mat_));
  }

  /// Residual of the spectral resolution: sum Pi^k = 1 and d_rho(J) Pi^k = ik Pi^k.
  double spectral_residual() const {
    const int n = half_dim();
    const auto size = spin_.rows();
    CMat sum = CMat::Zero(size, size);
    double worst = 0.0;
    for (int k = -n; k <= n; ++k) {
      sum += projector(k);
      worst = std::max(worst, max_abs(CMat(spin_ * projector(k) - cplx(0.0, k) * projector(k))));
    }
    return std::max(worst, max_abs(CMat(sum - CMat::Identity(size, size))));
  }

 private:
  explicit GeneralizedComplexStructure(const RMat& mat) : mat_(mat) {
    require_dim(mat.rows() == mat.cols() && mat.rows() % 2 == 0, "GeneralizedComplexStructure: matrix must be 2m x 2m");
    m_ = static_cast<int>(mat.rows() / 2);
    require_dim(m_ % 2 == 0 && m_ <= kMaxDim, "GeneralizedComplexStructure: m must be even and <= 8");
    if (axiom_residual() > kAxiomTol) throw AxiomViolation("generalized complex structure axioms", axiom_residual());
    const int n = half_dim();
    const CMat jc = mat_.cast<cplx>();
    const CMat id2 = CMat::Identity(2 * m_, 2 * m_);
    l_frame_ = detail::column_basis(0.5 * (id2 - kI * jc), m_, "L frame");
    spin_ = spin_matrix(as_so());
    // Interpolation over the known spectrum {ik : -n <= k <= n}.
    const auto size = spin_.rows();
    const CMat id = CMat::Identity(size, size);
    projectors_.reserve(2 * n + 1);
    for (int k = -n; k <= n; ++k) {
      CMat pk = id;
      for (int j = -n; j <= n; ++j)
        if (j != k) pk = pk * (spin_ - cplx(0.0, j) * id) / cplx(0.0, k - j);
      projectors_.push_back(pk);
    }
    if (spectral_residual() > kAxiomTol * 10)
      throw AxiomViolation("spin action of J has eigenvalues outside {ik}", spectral_residual());
    const CMat& top = projectors_.back();
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < top.cols(); ++c)
      if (top.col(c).norm() > top.col(best).norm() + 1e-12) best = c;
    CVec gen = top.col(best);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < gen.size(); ++i)
      if (std::abs(gen(i)) > std::abs(gen(arg)) + 1e-12) arg = i;
    gen /= gen(arg);
    canonical_ = Spinor(m_, gen);
  }

  int m_ = 0;
  RMat mat_;
  CMat l_frame_;
  CMat spin_;
  std::vector<CMat> projectors_;
  Spinor canonical_;
};

/// max |l . generator| over the L frame.
inline double canonical_annihilation_residual(const GeneralizedComplexStructure& j) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < j.l_frame().cols(); ++c)
    worst = std::max(worst, detail::clifford_apply(j.dim(), j.l_frame().col(c), j.canonical().coeffs()).norm());
  return worst;
}

using Bidegree = std::pair<int, int>;

class HermitianPair {
 public:
  HermitianPair(GeneralizedMetric metric, GeneralizedComplexStructure j1)
      : metric_(std::move(metric)), j1_(std::move(j1)), j2_(second_structure(metric_, j1_)) {
    const int m = dim();
    const int n = m / 2;
    const RMat p = pairing_matrix(m);

    // Orientation of V induced by J1 on V+ via pi_V.
    const RMat& ep = metric_.vplus_frame();
    const RMat jp = ep.transpose() * p * j1_.matrix() * ep;
    orientation_ = detail::complex_orientation(jp);
    star_ = star_matrix(metric_, orientation_);
    chevalley_ = chevalley_matrix(m);
    // top components are read in the orientation of the pair
    gram_ = static_cast<double>(orientation_) * (chevalley_.cast<cplx>() * star_).transpose();

    for (int a = -n; a <= n; ++a)
      for (int b = -n; b <= n; ++b) {
        CMat pr = j1_.projector(a) * j2_.projector(b);
        if (max_abs(pr) > 1e-8) bigraded_.emplace(Bidegree{a, b}, std::move(pr));
      }

    const CMat id2 = CMat::Identity(2 * m, 2 * m);
    const CMat to_l1 = 0.5 * (id2 - kI * j1_.matrix().cast<cplx>());
    const CMat ep_c = ep.cast<cplx>();
    const CMat em_c = metric_.vminus_frame().cast<cplx>();
    vplus10_ = detail::hermitian_gram_schmidt(detail::column_basis(to_l1 * ep_c, n, "V+^{1,0}"), 1.0);
    vminus10_ = detail::hermitian_gram_schmidt(detail::column_basis(to_l1 * em_c, n, "V-^{1,0}"), -1.0);

    const double star_res = star_identity_residual();
    if (star_res > kAxiomTol * 10) throw AxiomViolation("star != -JJ1 JJ2 (convention error)", star_res);
  }

  int dim() const { return metric_.dim(); }
  int half_dim() const { return dim() / 2; }
  const GeneralizedMetric& metric() const { return metric_; }
  const GeneralizedComplexStructure& j1() const { return j1_; }
  const GeneralizedComplexStructure& j2() const { return j2_; }
  int orientation() const { return orientation_; }
  const CMat& star() const { return star_; }
  const RMat& chevalley() const { return chevalley_; }
  /// W with l2 inner product h(f, g) = sum_k g_k^H W f_k.
  const CMat& gram() const { return gram_; }

  /// Pi^{p,q} (zero matrix when U^{p,q} = 0).
  CMat projector(int p, int q) const {
    auto it = bigraded_.find({p, q});
    if (it == bigraded_.end()) return CMat::Zero(star_.rows(), star_.cols());
    return it->second;
  }
  const std::map<Bidegree, CMat>& bigraded() const { return bigraded_; }
  std::vector<Bidegree> nonzero_bidegrees() const {
    std::vector<Bidegree> out;
    for (const auto& [pq, pr] : bigraded_) out.push_back(pq);
    return out;
  }
  int rank(int p, int q) const {
    const CMat pr = projector(p, q);
    return static_cast<int>(std::lround(pr.trace().real()));
  }

  const CMat& vplus10() const { return vplus10_; }
  CMat vplus01() const { return vplus10_.conjugate(); }
  const CMat& vminus10() const { return vminus10_; }
  CMat vminus01() const { return vminus10_.conjugate(); }

  /// e^{pi d_rho(J)/2} = sum_k i^k Pi^k
  static CMat quarter_turn(const GeneralizedComplexStructure& j) {
    const int n = j.half_dim();
    CMat out = CMat::Zero(j.spin().rows(), j.spin().cols());
    for (int k = -n; k <= n; ++k) out += std::pow(kI, k) * j.projector(k);
    return out;
  }
  double star_identity_residual() const {
    return max_abs(CMat(star_ + quarter_turn(j1_) * quarter_turn(j2_)));
  }

  /// Measured bidegree shift of Clifford action by v, or nullopt if v maps
  /// different U^{p,q} by different shifts (or acts as zero).
  std::optional<Bidegree> frame_shift(const CVec& v, double tol = 1e-9) const {
    const CMat act = clifford_matrix(dim(), v);
    std::optional<Bidegree> shift;
    for (const auto& [src, psrc] : bigraded_) {
      const CMat image = act * psrc;
      if (max_abs(image) < tol) continue;
      bool found = false;
      for (const auto& [dst, pdst] : bigraded_) {
        if (max_abs(CMat(pdst * image - image)) < tol) {
          const Bidegree s{dst.first - src.first, dst.second - src.second};
          if (shift && *shift != s) return std::nullopt;
          shift = s;
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    return shift;
  }

 private:
  static GeneralizedComplexStructure second_structure(const GeneralizedMetric& metric, const GeneralizedComplexStructure& j1) {
    require_dim(metric.dim() == j1.dim(), "hermitian_pair: dimension mismatch");
    const double comm = max_abs(RMat(metric.matrix() * j1.matrix() - j1.matrix() * metric.matrix()));
    if (comm > kAxiomTol * std::max(1.0, max_abs(metric.matrix())))
      throw AxiomViolation("G and J1 do not commute", comm);
    return GeneralizedComplexStructure::from_matrix(metric.matrix() * j1.matrix());
  }

  GeneralizedMetric metric_;
  GeneralizedComplexStructure j1_;
  GeneralizedComplexStructure j2_;
  int orientation_ = 1;
  CMat star_;
  RMat chevalley_;
  CMat gram_;
  std::map<Bidegree, CMat> bigraded_;
  CMat vplus10_, vminus10_;
};

inline HermitianPair hermitian_pair(const GeneralizedMetric& metric, const GeneralizedComplexStructure& j1) {
  return {metric, j1};
}

/// The standard complex structure on R^m: J d_{2i-1} = d_{2i}.
inline RMat standard_complex_structure(int m) {
  RMat j = RMat::Zero(m, m);
  for (int i = 0; i + 1 < m; i += 2) {
    j(i + 1, i) = 1.0;
    j(i, i + 1) = -1.0;
  }
  return j;
}

/// Kaehler pair: J1 from the complex structure, G from (g, 0). Requires g
/// J-invariant; J2 = G J1 is then the symplectic structure of the Kaehler form.
inline HermitianPair kaehler_pair(const RMat& g, const RMat& jv) {
  return {GeneralizedMetric::from_g_b(g, RMat::Zero(g.rows(), g.cols())), GeneralizedComplexStructure::from_complex_structure(jv)};
}

/// e^a J e^{-a}
inline GeneralizedComplexStructure deform_structure(const SoDouble& a, const GeneralizedComplexStructure& j) {
  check_antisymmetric(a);
  if (!a.is_real(1e-14)) throw AxiomViolation("deform_structure: a must be real", max_abs(a.matrix().imag()));
  const RMat ar = a.matrix().real();
  const RMat ea = expm(ar);
  const RMat eam = expm(RMat(-ar));
  return GeneralizedComplexStructure::from_matrix(ea * j.matrix() * eam);
}

/// Splitting of so(V+V*) relative to J: the part anticommuting with J lies in
/// (wedge^2 L + wedge^2 Lbar), the commuting part in (L (x) Lbar).
struct TransverseSplit {
  SoDouble transverse;  // (wedge^2 L + wedge^2 Lbar)
  SoDouble stabilizer;  // (L (x) Lbar)
};

inline TransverseSplit split_transverse(const SoDouble& alpha, const GeneralizedComplexStructure& j) {
  require_dim(alpha.dim() == j.dim(), "split_transverse: dimension mismatch");
  const CMat jc = j.matrix().cast<cplx>();
  const CMat& x = alpha.matrix();
  const CMat jxj = jc * x * jc;
  return {SoDouble(alpha.dim(), 0.5 * (x + jxj)), SoDouble(alpha.dim(), 0.5 * (x - jxj))};
}

/// Real basis (as 2m x 2m matrices) of the real transverse subspace.
inline std::vector<RMat> transverse_basis(const GeneralizedComplexStructure& j) {
  const int m = j.dim();
  const int d = 2 * m;
  const RMat pinv = 4.0 * pairing_matrix(m);  // P^{-1}
  std::vector<RMat> candidates;
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      RMat k = RMat::Zero(d, d);
      k(r, c) = 1.0;
      k(c, r) = -1.0;
      const RMat alpha = pinv * k;
      candidates.push_back(0.5 * (alpha + j.matrix() * alpha * j.matrix()));
    }
  RMat stacked(d * d, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t i = 0; i < candidates.size(); ++i)
    stacked.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const RVec>(candidates[i].data(), d * d);
  Eigen::JacobiSVD<RMat> svd(stacked, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  std::vector<RMat> basis;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= 1e-10 * s(0)) break;
    const RVec col = svd.matrixU().col(i);
    basis.emplace_back(Eigen::Map<const RMat>(col.data(), d, d));
  }
  return basis;
}

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-11;
};

namespace detail {

/// Frechet derivative of exp at x in direction e.
inline RMat expm_frechet(const RMat& x, const RMat& e) {
  const auto d = x.rows();
  RMat block = RMat::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = x;
  block.bottomRightCorner(d, d) = x;
  block.topRightCorner(d, d) = e;
  return expm(block).topRightCorner(d, d);
}

}  // namespace detail

/// The unique small a in (wedge^2 L1 + wedge^2 Lbar1)^R with
/// e^a J1 e^{-a} = target, by damped Gauss-Newton on the exponential map.
inline SoDouble lemma31_extract(const GeneralizedComplexStructure& target, const GeneralizedComplexStructure& j1,
                                NewtonOptions opts = {}) {
  require_dim(target.dim() == j1.dim(), "lemma31_extract: dimension mismatch");
  const int m = j1.dim();
  const int d = 2 * m;
  const auto basis = transverse_basis(j1);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const RMat& j = j1.matrix();
  RVec coef = RVec::Zero(nb);

  auto assemble = [&](const RVec& c) {
    RMat a = RMat::Zero(d, d);
    for (Eigen::Index i = 0; i < nb; ++i) a += c(i) * basis[static_cast<std::size_t>(i)];
    return a;
  };
  auto residual_of = [&](const RMat& a) -> RMat { return expm(a) * j * expm(RMat(-a)) - target.matrix(); };

  RMat a = assemble(coef);
  RMat res = residual_of(a);
  double err = max_abs(res);
  for (int it = 0; it < opts.max_iterations && err > opts.tolerance; ++it) {
    const RMat ea = expm(a);
    const RMat eam = expm(RMat(-a));
    RMat jac(d * d, nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
      const RMat& dir = basis[static_cast<std::size_t>(i)];
      const RMat dj = detail::expm_frechet(a, dir) * j * eam + ea * j * detail::expm_frechet(RMat(-a), RMat(-dir));
      jac.col(i) = Eigen::Map<const RVec>(dj.data(), d * d);
    }
    const RVec rhs = -Eigen::Map<const RVec>(res.data(), d * d);
    const RVec step = jac.colPivHouseholderQr().solve(rhs);
    double damping = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h) {
      const RVec trial = coef + damping * step;
      const RMat ta = assemble(trial);
      const RMat tres = residual_of(ta);
      const double terr = max_abs(tres);
      if (terr < err) {
        coef = trial;
        a = ta;
        res = tres;
        err = terr;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) break;
  }
  if (err > opts.tolerance) throw ConvergenceFailure("lemma31_extract: Newton did not converge", err);
  return {m, a.cast<cplx>()};
}

}  // namespace gks
