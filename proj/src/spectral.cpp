#include "meromat/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "meromat/errors.hpp"

namespace meromat {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square_finite(const ComplexMatrix& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    fail(ErrorKind::NonSquare,
         "expected a square matrix, got " + std::to_string(A.rows()) + "x" +
             std::to_string(A.cols()));
  if (!A.allFinite()) fail(ErrorKind::NonFinite, "matrix has NaN or Inf entries");
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// The chain machinery runs in extended precision: chains of a defective
// eigenvalue are determined by the double-precision input only up to the
// usual eps^(1/nu) fuzz, and carrying that through products and the basis
// inverse in double eats several orders of the invariant budget. The rank
// thresholds stay pinned to double-precision noise, where the input lives.
using LongComplex = std::complex<long double>;
using LongMatrix = Eigen::Matrix<LongComplex, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<LongComplex, Eigen::Dynamic, 1>;

// Orthonormal kernel basis of B. The threshold is relative to sigma_max but
// floored at the scale of the parent matrix: deep filtration levels can be
// numerically zero, and a purely relative cut would then count noise as rank.
template <class Matrix>
Matrix kernel_basis(const Matrix& B, double rank_safety, double scale_floor = 0.0) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double scale =
      std::max(sigma.size() > 0 ? static_cast<double>(sigma(0)) : 0.0, scale_floor);
  const double thresh = scale * static_cast<double>(B.rows()) * kEps * rank_safety;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (static_cast<double>(sigma(i)) > thresh) ++rank;
  return svd.matrixV().rightCols(B.cols() - rank);
}

// Kernel filtration of M = A - lambda I: nullity(M^k) and an orthonormal basis
// of ker(M^k) for each k until the dimension saturates. Each level solves
// ker((I - P_{k-1}) M) with P_{k-1} the projector onto ker(M^{k-1}): rank
// decisions stay well scaled at every level, where thresholding an explicit
// power would drown well-separated eigendirections once ||M|| is large.
template <class Matrix>
struct Filtration {
  std::vector<int> nullity;       // nullity[k-1] = dim ker(M^k)
  std::vector<Matrix> kernels;    // kernels[k-1] spans ker(M^k)
  int index = 0;
};

// scale_floor should carry the norm of the parent matrix: when the shift
// lands on a scalar multiple of the identity, M itself is numerically zero
// and cannot anchor its own rank threshold.
template <class Matrix>
Filtration<Matrix> kernel_filtration(const Matrix& M, int max_levels, double rank_safety,
                                     double scale_floor) {
  Filtration<Matrix> out;
  const int n = static_cast<int>(M.rows());
  const double scale = std::max(static_cast<double>(M.norm()), scale_floor);
  Matrix K = kernel_basis(M, rank_safety, scale);
  int prev = 0;
  for (int k = 1; k <= max_levels + 1; ++k) {
    int d = static_cast<int>(K.cols());
    if (d == prev) {
      out.index = k - 1;
      return out;
    }
    if (d < prev) break;  // nullity must grow; tolerance inconsistency
    out.nullity.push_back(d);
    out.kernels.push_back(K);
    prev = d;
    if (d == n) {
      out.index = k;
      return out;
    }
    Matrix B = M - K * (K.adjoint() * M);
    K = kernel_basis(B, rank_safety, scale);
  }
  out.index = 0;  // did not saturate: caller reports the inconsistency
  return out;
}

struct Cluster {
  Complex center;
  std::vector<Complex> members;
};

std::vector<Cluster> single_linkage(const ComplexVector& values, double tol) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values(i) - values(j)) <= tol) parent[find(i)] = find(j);

  std::vector<Cluster> clusters;
  std::vector<int> root_of(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_of[r] < 0) {
      root_of[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[root_of[r]].members.push_back(values(i));
  }
  for (auto& c : clusters) {
    Complex sum = std::accumulate(c.members.begin(), c.members.end(), Complex(0.0, 0.0));
    c.center = sum / static_cast<double>(c.members.size());
  }
  return clusters;
}

double cluster_gap(const Cluster& a, const Cluster& b) {
  double gap = std::numeric_limits<double>::infinity();
  for (Complex x : a.members)
    for (Complex y : b.members) gap = std::min(gap, std::abs(x - y));
  return gap;
}

ComplexMatrix shifted(const ComplexMatrix& A, Complex lambda) {
  ComplexMatrix M = A;
  M.diagonal().array() -= lambda;
  return M;
}

// Residuals over an assembled companion family; shared by both construction
// routes. Full pairwise orthogonality when the family is small, a structural
// sample otherwise.
Residuals companion_residuals(const ComplexMatrix& A, const Spectrum& spectrum,
                              const std::vector<std::vector<ComplexMatrix>>& companions) {
  const int n = static_cast<int>(A.rows());
  const int n_rec = static_cast<int>(companions.size());
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  Residuals res;

  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n_rec; ++i) sum += companions[i][0];
  res.completeness = (sum - I).norm();

  int total = 0;
  for (const auto& fam : companions) total += static_cast<int>(fam.size());

  auto pair_defect = [&](int i, int m, int j, int nn) {
    ComplexMatrix prod = companions[i][m] * companions[j][nn];
    if (i != j) return prod.norm();
    int k = m + nn;
    if (k < static_cast<int>(companions[i].size())) prod -= companions[i][k];
    return prod.norm();
  };

  if (total <= 24) {
    for (int i = 0; i < n_rec; ++i)
      for (int m = 0; m < static_cast<int>(companions[i].size()); ++m)
        for (int j = 0; j < n_rec; ++j)
          for (int nn = 0; nn < static_cast<int>(companions[j].size()); ++nn)
            res.orthogonality = std::max(res.orthogonality, pair_defect(i, m, j, nn));
  } else {
    for (int i = 0; i < n_rec; ++i) {
      for (int j = 0; j < n_rec; ++j)
        res.orthogonality = std::max(res.orthogonality, pair_defect(i, 0, j, 0));
      for (int m = 0; m + 1 < static_cast<int>(companions[i].size()); ++m)
        res.orthogonality = std::max(res.orthogonality, pair_defect(i, m, i, 1));
    }
  }

  ComplexMatrix D = ComplexMatrix::Zero(n, n);
  ComplexMatrix N = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n_rec; ++i) {
    D += spectrum.records[i].lambda * companions[i][0];
    if (companions[i].size() > 1) N += companions[i][1];
  }
  res.dunford_sum = (A - D - N).norm();
  res.dunford_commute = (D * N - N * D).norm();

  for (int i = 0; i < n_rec; ++i) {
    const auto& rec = spectrum.records[i];
    ComplexMatrix M = shifted(A, rec.lambda);
    res.nilpotency =
        std::max(res.nilpotency, (companions[i][rec.index - 1] * M).norm());
  }

  for (const auto& fam : companions)
    for (const auto& comp : fam)
      res.companion_scale = std::max(res.companion_scale, comp.norm());
  return res;
}

void check_residuals(const Residuals& res, double threshold) {
  // Companions of a highly defective operator can be legitimately huge (the
  // truncated counting generator reaches r^N); the gate is relative to them.
  double allowed = threshold * res.companion_scale;
  if (!(res.max() > allowed)) return;
  std::ostringstream os;
  os << "decomposition residual exceeds " << allowed << " (completeness "
     << res.completeness << ", orthogonality " << res.orthogonality << ", dunford "
     << res.dunford_sum << "/" << res.dunford_commute << ", nilpotency "
     << res.nilpotency << ")";
  fail(ErrorKind::InvariantViolation, os.str());
}

}  // namespace

Spectrum compute_spectrum(const ComplexMatrix& A, double cluster_tolerance,
                          double rank_safety) {
  require_square_finite(A);
  if (cluster_tolerance < 0.0)
    fail(ErrorKind::InvalidArgument, "cluster tolerance must be nonnegative");
  const int n = static_cast<int>(A.rows());

  ComplexVector raw(n);
  if (n == 1) {
    raw(0) = A(0, 0);
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      fail(ErrorKind::InvariantViolation, "eigenvalue iteration failed to converge");
    raw = solver.eigenvalues();
  }

  double tol = cluster_tolerance;
  if (tol == 0.0) {
    // A defective eigenvalue of index nu splits into a cluster of radius
    // ~eps^(1/nu); eps^(1/5) covers the indices this library targets while
    // staying far below unit-scale eigenvalue separations.
    double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
    tol = static_cast<double>(n) * std::pow(kEps, 0.2) * scale;
  }

  auto clusters = single_linkage(raw, tol);

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      double gap = cluster_gap(clusters[i], clusters[j]);
      if (gap < 1.5 * tol) {
        std::ostringstream os;
        os << "clusters at " << format_complex(clusters[i].center) << " and "
           << format_complex(clusters[j].center) << " are separated by only " << gap
           << " (tolerance " << tol << "); candidate groupings: keep separate, or merge "
           << "into one eigenvalue of multiplicity "
           << clusters[i].members.size() + clusters[j].members.size();
        fail(ErrorKind::ClusterAmbiguity, os.str());
      }
    }
  }

  Spectrum spectrum;
  spectrum.cluster_tolerance = tol;
  spectrum.dim = n;
  for (const auto& c : clusters) {
    EigenvalueRecord rec;
    rec.lambda = c.center;
    rec.algebraic = static_cast<int>(c.members.size());

    auto filt = kernel_filtration(shifted(A, rec.lambda), rec.algebraic, rank_safety, A.norm());
    if (filt.index == 0 || filt.nullity.back() != rec.algebraic) {
      std::ostringstream os;
      os << "cluster at " << format_complex(rec.lambda) << " has size " << rec.algebraic
         << " but its invariant subspace has dimension "
         << (filt.nullity.empty() ? 0 : filt.nullity.back())
         << "; the grouping is ambiguous at tolerance " << tol;
      fail(ErrorKind::ClusterAmbiguity, os.str());
    }
    rec.geometric = filt.nullity.front();
    rec.index = filt.index;
    spectrum.records.push_back(rec);
  }

  std::sort(spectrum.records.begin(), spectrum.records.end(),
            [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
              double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
              if (ma != mb) return ma > mb;
              if (a.lambda.real() != b.lambda.real())
                return a.lambda.real() > b.lambda.real();
              return a.lambda.imag() > b.lambda.imag();
            });
  return spectrum;
}

JordanBasis jordan_basis(const ComplexMatrix& A, const Spectrum& spectrum,
                         double rank_safety) {
  require_square_finite(A);
  const int n = static_cast<int>(A.rows());
  if (spectrum.dim != n)
    fail(ErrorKind::InvalidArgument, "spectrum does not match the matrix dimension");

  const LongMatrix Awide = A.cast<LongComplex>();

  JordanBasis basis;
  basis.cluster_tolerance = spectrum.cluster_tolerance;
  LongMatrix Y(n, n);
  int col = 0;

  for (const auto& rec : spectrum.records) {
    LongMatrix M = Awide;
    M.diagonal().array() -= LongComplex(rec.lambda.real(), rec.lambda.imag());
    // Work with the unit-scaled shift; chain members are rescaled afterwards
    // so the final chains satisfy (A - lambda I) v_{j+1} = v_j exactly.
    const long double theta =
        std::max(M.norm(), static_cast<long double>(std::numeric_limits<double>::min()));
    const LongMatrix Mu = M / theta;
    auto filt = kernel_filtration(M, rec.algebraic, rank_safety, static_cast<double>(Awide.norm()));
    if (filt.index != rec.index ||
        (filt.nullity.empty() ? 0 : filt.nullity.back()) != rec.algebraic)
      fail(ErrorKind::ChainConstructionFailure,
           "rank decisions for eigenvalue " + format_complex(rec.lambda) +
               " are inconsistent with the spectrum; try a larger cluster tolerance");

    auto nullity_at = [&](int k) {
      if (k <= 0) return 0;
      if (k > rec.index) return filt.nullity.back();
      return filt.nullity[k - 1];
    };

    // With the dimensions settled, replace each kernel with the bottom
    // singular subspace of the explicit unit-scale power: no thresholds are
    // involved, and these subspaces carry the chain-head minimizers that the
    // level-by-level recursion blurs.
    {
      LongMatrix Mk = Mu;
      for (int k = 1; k <= rec.index; ++k) {
        Eigen::JacobiSVD<LongMatrix> psvd(Mk, Eigen::ComputeFullV);
        filt.kernels[k - 1] = psvd.matrixV().rightCols(filt.nullity[k - 1]);
        if (k < rec.index) Mk = Mu * Mk;
      }
    }

    // chains[c] = (v_1, ..., v_k) with (A - lambda I) v_{j+1} = v_j.
    std::vector<std::vector<LongVector>> chains;

    for (int k = rec.index; k >= 1; --k) {
      int blocks_of_size_k = (nullity_at(k) - nullity_at(k - 1)) -
                             (nullity_at(k + 1) - nullity_at(k));
      if (blocks_of_size_k < 0)
        fail(ErrorKind::ChainConstructionFailure,
             "kernel filtration of eigenvalue " + format_complex(rec.lambda) +
                 " is not staircase-shaped; try a larger cluster tolerance");
      if (blocks_of_size_k == 0) continue;

      // Exclude ker(M^{k-1}) and the level-k members of longer chains, then
      // take orthonormal heads from what remains of ker(M^k).
      int carried = 0;
      for (const auto& ch : chains)
        if (static_cast<int>(ch.size()) > k) ++carried;
      LongMatrix excluded(n, nullity_at(k - 1) + carried);
      int bc = 0;
      if (k >= 2) {
        excluded.leftCols(nullity_at(k - 1)) = filt.kernels[k - 2];
        bc = nullity_at(k - 1);
      }
      for (const auto& ch : chains)
        if (static_cast<int>(ch.size()) > k) excluded.col(bc++) = ch[k - 1];

      const LongMatrix& K = filt.kernels[k - 1];
      LongMatrix W = K;
      if (excluded.cols() > 0) {
        Eigen::HouseholderQR<LongMatrix> qr(excluded);
        LongMatrix Q = qr.householderQ() * LongMatrix::Identity(n, excluded.cols());
        W -= Q * (Q.adjoint() * W);
      }
      const int b_k = blocks_of_size_k;
      const int dk = static_cast<int>(K.cols());
      Eigen::JacobiSVD<LongMatrix> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (svd.singularValues().size() < b_k ||
          static_cast<double>(svd.singularValues()(b_k - 1)) < 1e-7)
        fail(ErrorKind::ChainConstructionFailure,
             "could not extract independent chain heads for eigenvalue " +
                 format_complex(rec.lambda) + "; try a larger cluster tolerance");

      // Heads minimize ||M^k head|| over the full kernel coset. The chain
      // relations hold by construction for every other member, so this one
      // residual sets the reconstruction quality of the whole basis; lower
      // kernel directions are free admixtures, normalized so the component
      // independent of the excluded space stays orthonormal.
      LongMatrix Mk = Mu;
      for (int p = 1; p < k; ++p) Mk = Mu * Mk;
      LongMatrix G = Mk * K;
      LongMatrix V1 = svd.matrixV().leftCols(b_k);
      for (int c = 0; c < b_k; ++c) V1.col(c) /= svd.singularValues()(c);
      LongMatrix T1 = G * V1;
      LongMatrix coeffs;
      if (dk > b_k) {
        LongMatrix V2 = svd.matrixV().rightCols(dk - b_k);
        LongMatrix T2 = G * V2;
        Eigen::ColPivHouseholderQR<LongMatrix> lsq(T2);
        LongMatrix Z = lsq.solve(T1);
        Eigen::JacobiSVD<LongMatrix> head_svd(T1 - T2 * Z, Eigen::ComputeFullV);
        LongMatrix Yrot = head_svd.matrixV();
        coeffs = V1 * Yrot - V2 * (Z * Yrot);
      } else {
        Eigen::JacobiSVD<LongMatrix> head_svd(T1, Eigen::ComputeFullV);
        coeffs = V1 * head_svd.matrixV();
      }

      for (int b = 0; b < b_k; ++b) {
        LongVector cvec = coeffs.col(b_k - 1 - b);  // smallest residual first
        LongVector head;
        // A large admixture coefficient would trade the residual for basis
        // conditioning; fall back to the plainly projected head then.
        if (static_cast<double>(cvec.norm()) < 50.0) {
          head = K * cvec;
          head /= head.norm();
        } else {
          head = svd.matrixU().col(b);
        }
        int imax;
        head.cwiseAbs().maxCoeff(&imax);
        head *= std::conj(head(imax)) / std::abs(head(imax));

        std::vector<LongVector> chain(k);
        chain[k - 1] = head;
        for (int j = k - 1; j >= 1; --j) chain[j - 1] = Mu * chain[j];
        // Descending with the unit-scaled shift gives M v_{j+1} = theta v_j;
        // rescale so the chain satisfies the relation with coefficient one.
        long double rescale = 1.0;
        for (int j = 1; j < k; ++j) {
          rescale /= theta;
          chain[j] *= rescale;
        }

        // Balance the chain around unit norm; the remaining scale freedom is
        // one scalar per chain and this choice keeps Y well conditioned.
        long double log_mean = 0.0;
        for (const auto& v : chain) log_mean += std::log(v.norm());
        long double balance = std::exp(-log_mean / static_cast<long double>(k));
        for (auto& v : chain) v *= balance;
        chains.push_back(std::move(chain));
      }
    }

    for (const auto& ch : chains) {
      basis.blocks.push_back({rec.lambda, static_cast<int>(ch.size())});
      for (const auto& v : ch) Y.col(col++) = v;
    }
  }

  if (col != n)
    fail(ErrorKind::ChainConstructionFailure,
         "chain construction produced " + std::to_string(col) + " of " +
             std::to_string(n) + " basis vectors");

  Eigen::PartialPivLU<LongMatrix> lu(Y);
  LongMatrix Yinv = lu.inverse();
  if (!Yinv.allFinite())
    fail(ErrorKind::ChainConstructionFailure,
         "generalized eigenvector basis is numerically singular; "
         "try a larger cluster tolerance");
  basis.Y = Y.cast<Complex>();
  basis.Yinv = Yinv.cast<Complex>();
  if ((basis.Y * basis.Yinv - ComplexMatrix::Identity(n, n)).norm() > 1e-6 * n)
    fail(ErrorKind::ChainConstructionFailure,
         "generalized eigenvector basis is numerically singular; "
         "try a larger cluster tolerance");
  return basis;
}

SpectralDecomposition eigenprojectors(const ComplexMatrix& A, const JordanBasis& basis,
                                      double invariant_threshold) {
  require_square_finite(A);
  const int n = static_cast<int>(A.rows());
  if (basis.Y.rows() != n)
    fail(ErrorKind::InvalidArgument, "basis does not match the matrix dimension");

  SpectralDecomposition decomp;
  decomp.source = A;
  decomp.spectrum.cluster_tolerance = basis.cluster_tolerance;
  decomp.spectrum.dim = n;

  // Blocks for one eigenvalue are contiguous by construction.
  int b = 0;
  int col0 = 0;
  const int n_blocks = static_cast<int>(basis.blocks.size());
  while (b < n_blocks) {
    Complex lambda = basis.blocks[b].lambda;
    int e = b;
    int a = 0, nu = 0;
    while (e < n_blocks && basis.blocks[e].lambda == lambda) {
      a += basis.blocks[e].size;
      nu = std::max(nu, basis.blocks[e].size);
      ++e;
    }

    EigenvalueRecord rec;
    rec.lambda = lambda;
    rec.algebraic = a;
    rec.geometric = e - b;
    rec.index = nu;
    decomp.spectrum.records.push_back(rec);

    // A_{lambda,m} = sum over blocks of Y[:, 1..s-m] * Yinv[m+1..s, :], the
    // exact within-block shift; no numeric powering of assembled matrices.
    std::vector<ComplexMatrix> family(nu);
    for (int m = 0; m < nu; ++m) {
      family[m] = ComplexMatrix::Zero(n, n);
      int c = col0;
      for (int blk = b; blk < e; ++blk) {
        int s = basis.blocks[blk].size;
        if (m < s)
          family[m] += basis.Y.middleCols(c, s - m) * basis.Yinv.middleRows(c + m, s - m);
        c += s;
      }
    }
    decomp.companions.push_back(std::move(family));
    col0 += a;
    b = e;
  }

  decomp.residuals = companion_residuals(A, decomp.spectrum, decomp.companions);
  check_residuals(decomp.residuals, invariant_threshold);
  return decomp;
}

ComplexMatrix index_one_projector(const ComplexMatrix& A, const Spectrum& spectrum,
                                  Complex lambda) {
  require_square_finite(A);
  int idx = spectrum.find(lambda);
  if (idx < 0)
    fail(ErrorKind::MissingEigenvalueData,
         format_complex(lambda) + " is not in the computed spectrum");
  const auto& rec = spectrum.records[idx];
  if (rec.index != 1)
    fail(ErrorKind::IndexNotOne, "eigenvalue " + format_complex(rec.lambda) +
                                     " has index " + std::to_string(rec.index));

  // Multiply farthest factors first so partial products stay tame.
  std::vector<const EigenvalueRecord*> others;
  for (const auto& r : spectrum.records)
    if (&r != &spectrum.records[idx]) others.push_back(&r);
  std::sort(others.begin(), others.end(),
            [&](const EigenvalueRecord* x, const EigenvalueRecord* y) {
              return std::abs(x->lambda - rec.lambda) > std::abs(y->lambda - rec.lambda);
            });

  const int n = static_cast<int>(A.rows());
  ComplexMatrix P = ComplexMatrix::Identity(n, n);
  for (const auto* other : others) {
    ComplexMatrix factor = shifted(A, other->lambda) / (rec.lambda - other->lambda);
    for (int e = 0; e < other->index; ++e) P = P * factor;
  }
  return P;
}

ComplexMatrix resolvent(const SpectralDecomposition& decomp, Complex z) {
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& rec : decomp.spectrum.records)
    dist = std::min(dist, std::abs(z - rec.lambda));
  if (dist <= decomp.spectrum.cluster_tolerance)
    fail(ErrorKind::SpectrumHit, "z = " + format_complex(z) +
                                     " is within the cluster tolerance of an eigenvalue");

  const int n = decomp.dim();
  ComplexMatrix R = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < decomp.companions.size(); ++i) {
    Complex dz = z - decomp.spectrum.records[i].lambda;
    Complex w = 1.0 / dz;
    for (const auto& comp : decomp.companions[i]) {
      R += w * comp;
      w /= dz;
    }
  }
  return R;
}

ComplexMatrix contour_projector_oracle(const ComplexMatrix& A, Complex lambda,
                                       double radius, int n_points, int m) {
  require_square_finite(A);
  if (radius <= 0.0) fail(ErrorKind::InvalidArgument, "contour radius must be positive");
  if (n_points < 64) fail(ErrorKind::InvalidArgument, "need at least 64 contour points");
  if (m < 0) fail(ErrorKind::InvalidArgument, "companion order m must be nonnegative");
  const int n = static_cast<int>(A.rows());

  ComplexVector raw(n);
  if (n == 1) {
    raw(0) = A(0, 0);
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, false);
    raw = solver.eigenvalues();
  }
  // Raw eigenvalues within a tenth of the radius count as lambda's own
  // cluster (defective splitting); anything else inside the circle is a
  // genuinely different eigenvalue.
  for (int i = 0; i < n; ++i) {
    double d = std::abs(raw(i) - lambda);
    if (d > 0.1 * radius && d <= radius * (1.0 + 1e-12))
      fail(ErrorKind::ContourContainsOtherEigenvalue,
           "eigenvalue " + format_complex(raw(i)) + " lies inside the contour around " +
               format_complex(lambda));
  }

  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n_points; ++j) {
    double theta = 2.0 * std::numbers::pi * j / n_points;
    Complex offset = std::polar(radius, theta);
    Complex z = lambda + offset;
    ComplexMatrix R = (z * I - A).partialPivLu().solve(I);
    acc += std::pow(offset, m + 1) * R;
  }
  return acc / static_cast<double>(n_points);
}

SpectralDecomposition decompose(const ComplexMatrix& A, const SpectralOptions& opts) {
  Spectrum spectrum = compute_spectrum(A, opts.cluster_tolerance, opts.rank_safety);
  const int n = static_cast<int>(A.rows());

  int defective = 0;
  int defective_mult = 0;
  for (const auto& rec : spectrum.records)
    if (rec.index > 1) {
      ++defective;
      defective_mult = rec.algebraic;
    }

  // The index-one product route. Companions of a defective eigenvalue would
  // have to be formed as A_d (A - lambda I)^m, which amplifies rounding by
  // ||A - lambda I|| per power; keep the shortcut to cases where that stays
  // harmless: diagonalizable spectra, or one small defective block.
  bool shortcut = spectrum.records.size() <= 8 &&
                  (defective == 0 || (defective == 1 && defective_mult <= 2 &&
                                      spectrum.spectral_radius() <= 10.0));
  if (shortcut) {
    SpectralDecomposition decomp;
    decomp.source = A;
    decomp.spectrum = spectrum;
    decomp.companions.resize(spectrum.records.size());

    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    int def_idx = -1;
    for (std::size_t i = 0; i < spectrum.records.size(); ++i) {
      if (spectrum.records[i].index > 1) {
        def_idx = static_cast<int>(i);
        continue;
      }
      decomp.companions[i] = {index_one_projector(A, spectrum, spectrum.records[i].lambda)};
      sum += decomp.companions[i][0];
    }
    if (def_idx >= 0) {
      const auto& rec = spectrum.records[def_idx];
      std::vector<ComplexMatrix> family(rec.index);
      family[0] = ComplexMatrix::Identity(n, n) - sum;
      ComplexMatrix M = shifted(A, rec.lambda);
      for (int m = 1; m < rec.index; ++m) family[m] = family[m - 1] * M;
      decomp.companions[def_idx] = std::move(family);
    }

    decomp.residuals = companion_residuals(A, spectrum, decomp.companions);
    if (decomp.residuals.max() <= std::min(opts.invariant_threshold, 3e-9))
      return decomp;
    // Shortcut disqualified itself; rebuild through the Jordan route.
  }

  // Chain construction applies A - lambda I repeatedly, so work at unit scale:
  // on a matrix of norm 500 the head errors would be amplified by that norm
  // at every chain step. The affine map back is exact in structure.
  const double scale = A.norm();
  const bool normalize = scale > 4.0 || (scale > 0.0 && scale < 0.25);
  if (!normalize) {
    JordanBasis basis = jordan_basis(A, spectrum, opts.rank_safety);
    return eigenprojectors(A, basis, opts.invariant_threshold);
  }

  ComplexMatrix scaled = A / scale;
  Spectrum scaled_spectrum = spectrum;
  scaled_spectrum.cluster_tolerance /= scale;
  for (auto& rec : scaled_spectrum.records) rec.lambda /= scale;

  JordanBasis basis = jordan_basis(scaled, scaled_spectrum, opts.rank_safety);
  SpectralDecomposition unit = eigenprojectors(scaled, basis, opts.invariant_threshold);
  SpectralDecomposition full = affine_map(unit, Complex(0.0, 0.0), Complex(scale, 0.0));
  full.source = A;
  full.residuals = companion_residuals(A, full.spectrum, full.companions);
  check_residuals(full.residuals, opts.invariant_threshold);
  return full;
}

SpectralDecomposition affine_map(const SpectralDecomposition& decomp, Complex shift,
                                 Complex scale) {
  if (scale == Complex(0.0, 0.0))
    fail(ErrorKind::InvalidArgument, "affine_map requires a nonzero scale");
  SpectralDecomposition out;
  const int n = decomp.dim();
  out.source = shift * ComplexMatrix::Identity(n, n) + scale * decomp.source;
  out.spectrum = decomp.spectrum;
  out.spectrum.cluster_tolerance = decomp.spectrum.cluster_tolerance * std::abs(scale);
  out.residuals = decomp.residuals;
  out.companions = decomp.companions;
  for (std::size_t i = 0; i < out.companions.size(); ++i) {
    out.spectrum.records[i].lambda = shift + scale * decomp.spectrum.records[i].lambda;
    Complex w = scale;
    for (std::size_t m = 1; m < out.companions[i].size(); ++m) {
      out.companions[i][m] *= w;
      w *= scale;
    }
  }
  return out;
}

}  // namespace meromat
