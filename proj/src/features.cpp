#include "bathyplan/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bathyplan/error.hpp"

namespace bathyplan {

Encoder Encoder::geometric(int patch_size, double cellsize) {
  if (patch_size < 3 || patch_size % 2 == 0)
    throw std::invalid_argument("geometric encoder needs an odd patch size >= 3");
  Encoder e;
  e.kind_ = EncoderKind::geometric;
  e.patch_size_ = patch_size;
  e.cellsize_ = cellsize;
  return e;
}

Encoder Encoder::linear(int patch_size, Eigen::VectorXd mean, Eigen::MatrixXd projection,
                        Eigen::VectorXd eigenvalues, double total_variance) {
  if (mean.size() != patch_size * patch_size || projection.cols() != mean.size())
    throw std::invalid_argument("linear encoder shape mismatch");
  Encoder e;
  e.kind_ = EncoderKind::linear;
  e.patch_size_ = patch_size;
  e.mean_ = std::move(mean);
  e.projection_ = std::move(projection);
  e.eigenvalues_ = std::move(eigenvalues);
  e.total_variance_ = total_variance;
  return e;
}

double Encoder::predicted_mse() const {
  if (kind_ != EncoderKind::linear) return 0.0;
  const double kept = eigenvalues_.head(projection_.rows()).sum();
  return std::max(0.0, total_variance_ - kept);
}

Eigen::VectorXd Encoder::reconstruct(const FeatureVector& z) const {
  if (kind_ != EncoderKind::linear) throw std::logic_error("reconstruct needs a linear encoder");
  return mean_ + projection_.transpose() * z;
}

FeatureVector Encoder::encode(const Patch& patch) const {
  if (patch.size != patch_size_)
    throw std::invalid_argument("patch size " + std::to_string(patch.size) +
                                " does not match encoder size " + std::to_string(patch_size_));
  if (kind_ == EncoderKind::geometric) return geometric_features(patch, cellsize_);
  const Eigen::Map<const Eigen::VectorXd> x(patch.values.data(), static_cast<Eigen::Index>(patch.values.size()));
  return projection_ * (x - mean_);
}

FeatureVector geometric_features(const Patch& patch, double cellsize) {
  const int n = patch.size;
  const int half = n / 2;
  const double m = static_cast<double>(n) * n;

  double mean = 0.0;
  for (double v : patch.values) mean += v;
  mean /= m;

  // Offsets are symmetric about the center, so the normal equations decouple.
  double sxz = 0.0, syz = 0.0, sxx = 0.0, syy = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = (c - half) * cellsize;  // east
      const double y = (half - r) * cellsize;  // north
      const double z = patch.values[static_cast<std::size_t>(r) * n + c] - mean;
      sxz += x * z;
      syz += y * z;
      sxx += x * x;
      syy += y * y;
    }
  }
  const double b = sxx > 0.0 ? sxz / sxx : 0.0;
  const double c = syy > 0.0 ? syz / syy : 0.0;
  const double slope = std::hypot(b, c);

  double ss = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const double x = (col - half) * cellsize;
      const double y = (half - r) * cellsize;
      const double res = patch.values[static_cast<std::size_t>(r) * n + col] - (mean + b * x + c * y);
      ss += res * res;
    }
  }
  const double rugosity = std::sqrt(ss / m);
  // Downhill direction is -(b, c); sin(azimuth) is its east component over |gradient|.
  const double sin_aspect = slope > 1e-12 ? -b / slope : 0.0;

  FeatureVector f(4);
  f << mean, slope, sin_aspect, rugosity;
  return f;
}

Encoder fit_linear_encoder(std::span<const Patch> samples, int d) {
  if (samples.empty()) throw std::invalid_argument("no training patches");
  const int size = samples.front().size;
  const Eigen::Index p = static_cast<Eigen::Index>(size) * size;
  if (d < 1 || d > p) throw std::invalid_argument("latent dimension must lie in [1, " + std::to_string(p) + "]");
  if (samples.size() <= static_cast<std::size_t>(d))
    throw std::invalid_argument("need more than d training patches");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(p, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (s.size != size) throw std::invalid_argument("training patches differ in size");
    x.col(i) = Eigen::Map<const Eigen::VectorXd>(s.values.data(), p);
  }
  const Eigen::VectorXd mean = x.rowwise().mean();
  x.colwise() -= mean;
  const Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw DataError("eigendecomposition of patch covariance failed");
  // Eigen returns ascending order.
  const Eigen::VectorXd evals = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();

  const double top = evals.size() ? evals(0) : 0.0;
  const double tol = std::max(top * 1e-12 * static_cast<double>(p), 1e-300);
  const auto rank = static_cast<int>((evals.array() > tol).count());
  if (rank < d)
    throw DataError("training patches have rank " + std::to_string(rank) + ", below latent dimension " +
                    std::to_string(d));

  Eigen::MatrixXd proj(d, p);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd v = evecs.col(k);
    // Fix the sign so the largest-magnitude component is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    proj.row(k) = v.transpose();
  }
  return Encoder::linear(size, mean, proj, evals, cov.trace());
}

std::vector<Patch> sample_patches(const BathyGrid& grid, int size, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> row(0, grid.nrows() - 1), col(0, grid.ncols() - 1);
  std::vector<Patch> out;
  out.reserve(count);
  const std::size_t max_tries = std::max<std::size_t>(count * 50, 1000);
  for (std::size_t tries = 0; out.size() < count && tries < max_tries; ++tries) {
    const Cell c{row(rng), col(rng)};
    if (auto p = extract_patch(grid, c, size)) out.push_back(std::move(*p));
  }
  return out;
}

int FeatureField::site_at(int li, int lj) const {
  if (li < 0 || lj < 0 || li >= lattice_rows || lj >= lattice_cols) return -1;
  return lattice[static_cast<std::size_t>(li) * lattice_cols + lj];
}

std::size_t FeatureField::nearest_site(const BathyGrid& grid, const Position& p) const {
  if (sites.empty()) throw std::logic_error("nearest_site on an empty feature field");
  const double cs = grid.cellsize();
  const double row_f = (grid.yllcorner() + (grid.nrows() - 0.5) * cs - p.northing) / cs;
  const double col_f = (p.easting - grid.xllcorner()) / cs - 0.5;
  const double li_f = (row_f - origin.row) / stride;
  const double lj_f = (col_f - origin.col) / stride;

  const int li0 = static_cast<int>(std::clamp(std::lround(li_f), 0L, static_cast<long>(lattice_rows - 1)));
  const int lj0 = static_cast<int>(std::clamp(std::lround(lj_f), 0L, static_cast<long>(lattice_cols - 1)));
  const double off = std::max(std::abs(li_f - li0), std::abs(lj_f - lj0));
  const int max_ring = std::max(lattice_rows, lattice_cols);

  double best = std::numeric_limits<double>::infinity();
  int best_site = -1;
  auto consider = [&](int li, int lj) {
    const int s = site_at(li, lj);
    if (s < 0) return;
    const double d2 = (li - li_f) * (li - li_f) + (lj - lj_f) * (lj - lj_f);
    if (d2 < best || (d2 == best && s < best_site)) {
      best = d2;
      best_site = s;
    }
  };
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (best_site >= 0) {
      const double lower = ring - off;
      if (lower > 0 && lower * lower > best) break;
    }
    if (ring == 0) {
      consider(li0, lj0);
      continue;
    }
    for (int k = -ring; k <= ring; ++k) {
      consider(li0 - ring, lj0 + k);
      consider(li0 + ring, lj0 + k);
    }
    for (int k = -ring + 1; k <= ring - 1; ++k) {
      consider(li0 + k, lj0 - ring);
      consider(li0 + k, lj0 + ring);
    }
  }
  return static_cast<std::size_t>(best_site);
}

namespace {

struct Lattice {
  Cell origin;
  int rows, cols;
};

Lattice make_lattice(const BathyGrid& grid, int patch_size, int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int half = patch_size / 2;
  Lattice l{{half, half}, 0, 0};
  if (grid.nrows() > half) l.rows = (grid.nrows() - 1 - half) / stride + 1;
  if (grid.ncols() > half) l.cols = (grid.ncols() - 1 - half) / stride + 1;
  return l;
}

FeatureField assemble(const BathyGrid& grid, const Encoder& encoder, int stride, const Lattice& lat,
                      std::vector<std::optional<FeatureVector>>& slots) {
  FeatureField field;
  field.stride = stride;
  field.patch_size = encoder.patch_size();
  field.origin = lat.origin;
  field.lattice_rows = lat.rows;
  field.lattice_cols = lat.cols;
  field.lattice.assign(slots.size(), -1);
  std::size_t count = 0;
  for (const auto& s : slots) count += s ? 1 : 0;
  if (count == 0) throw DataError("no valid patch centers on the feature lattice");

  field.features.resize(encoder.dim(), static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k]) continue;
    const int li = static_cast<int>(k / static_cast<std::size_t>(lat.cols));
    const int lj = static_cast<int>(k % static_cast<std::size_t>(lat.cols));
    const Cell c{lat.origin.row + li * stride, lat.origin.col + lj * stride};
    const auto idx = field.sites.size();
    field.lattice[k] = static_cast<int>(idx);
    field.sites.push_back(c);
    field.positions.push_back(grid.cell_center(c));
    field.features.col(static_cast<Eigen::Index>(idx)) = *slots[k];
  }
  return field;
}

}  // namespace

FeatureField build_feature_field(const BathyGrid& grid, const Encoder& encoder, int stride) {
  const Lattice lat = make_lattice(grid, encoder.patch_size(), stride);
  std::vector<std::optional<FeatureVector>> slots(static_cast<std::size_t>(lat.rows) * lat.cols);
#pragma omp parallel for schedule(dynamic, 1)
  for (int li = 0; li < lat.rows; ++li) {
    for (int lj = 0; lj < lat.cols; ++lj) {
      const Cell c{lat.origin.row + li * stride, lat.origin.col + lj * stride};
      if (auto patch = extract_patch(grid, c, encoder.patch_size()))
        slots[static_cast<std::size_t>(li) * lat.cols + lj] = encoder.encode(*patch);
    }
  }
  return assemble(grid, encoder, stride, lat, slots);
}

FeatureField build_feature_field_serial(const BathyGrid& grid, const Encoder& encoder, int stride) {
  const Lattice lat = make_lattice(grid, encoder.patch_size(), stride);
  std::vector<std::optional<FeatureVector>> slots(static_cast<std::size_t>(lat.rows) * lat.cols);
  for (int li = 0; li < lat.rows; ++li) {
    for (int lj = 0; lj < lat.cols; ++lj) {
      const Cell c{lat.origin.row + li * stride, lat.origin.col + lj * stride};
      if (auto patch = extract_patch(grid, c, encoder.patch_size()))
        slots[static_cast<std::size_t>(li) * lat.cols + lj] = encoder.encode(*patch);
    }
  }
  return assemble(grid, encoder, stride, lat, slots);
}

void write_feature_field(std::ostream& out, const FeatureField& field) {
  out << "# bathyplan feature field\n"
      << "# stride " << field.stride << '\n'
      << "# patch " << field.patch_size << '\n'
      << "row,col,easting,northing";
  for (int k = 0; k < field.dim(); ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << field.sites[i].row << ',' << field.sites[i].col << ',' << format_double(field.positions[i].easting)
        << ',' << format_double(field.positions[i].northing);
    for (int k = 0; k < field.dim(); ++k) out << ',' << format_double(field.features(k, static_cast<Eigen::Index>(i)));
    out << '\n';
  }
}

FeatureField read_feature_field(std::istream& in, const BathyGrid& grid) {
  std::string line;
  std::size_t lineno = 0;
  int stride = 0, patch = 1;
  int dim = -1;
  struct Row {
    Cell cell;
    std::vector<double> f;
  };
  std::vector<Row> rows;

  auto parse_num = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "non-numeric field '" + tok + "'");
    }
    if (used != tok.size()) throw ParseError(lineno, "non-numeric field '" + tok + "'");
    return v;
  };

  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      int value = 0;
      if (ss >> key >> value) {
        if (key == "stride") stride = value;
        if (key == "patch") patch = value;
      }
      continue;
    }
    std::vector<std::string> toks;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (!header_seen) {
      if (toks.size() < 5 || toks[0] != "row" || toks[1] != "col" || toks[2] != "easting" || toks[3] != "northing")
        throw ParseError(lineno, "expected header 'row,col,easting,northing,f0,...'");
      dim = static_cast<int>(toks.size()) - 4;
      header_seen = true;
      continue;
    }
    if (static_cast<int>(toks.size()) != dim + 4)
      throw ParseError(lineno, "expected " + std::to_string(dim + 4) + " columns");
    Row r;
    r.cell = {static_cast<int>(parse_num(toks[0])), static_cast<int>(parse_num(toks[1]))};
    if (!grid.contains(r.cell)) throw ParseError(lineno, "site outside the grid");
    const Position expect = grid.cell_center(r.cell);
    const Position got{parse_num(toks[2]), parse_num(toks[3])};
    if (distance(expect, got) > 1e-6 * grid.cellsize() + 1e-9)
      throw ParseError(lineno, "site coordinates disagree with the grid cell center");
    for (int k = 0; k < dim; ++k) {
      const double v = parse_num(toks[4 + static_cast<std::size_t>(k)]);
      if (!std::isfinite(v)) throw ParseError(lineno, "non-finite feature value");
      r.f.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen || rows.empty()) throw DataError("feature table has no sites");

  Cell origin{rows[0].cell.row, rows[0].cell.col};
  for (const auto& r : rows) {
    origin.row = std::min(origin.row, r.cell.row);
    origin.col = std::min(origin.col, r.cell.col);
  }
  if (stride <= 0) {
    int g = 0;
    for (const auto& r : rows) g = std::gcd(g, std::gcd(r.cell.row - origin.row, r.cell.col - origin.col));
    stride = std::max(g, 1);
  }
  int max_li = 0, max_lj = 0;
  for (const auto& r : rows) {
    if ((r.cell.row - origin.row) % stride || (r.cell.col - origin.col) % stride)
      throw DataError("feature sites do not lie on a lattice of stride " + std::to_string(stride));
    max_li = std::max(max_li, (r.cell.row - origin.row) / stride);
    max_lj = std::max(max_lj, (r.cell.col - origin.col) / stride);
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.cell.row != b.cell.row ? a.cell.row < b.cell.row : a.cell.col < b.cell.col;
  });

  FeatureField field;
  field.stride = stride;
  field.patch_size = patch;
  field.origin = origin;
  field.lattice_rows = max_li + 1;
  field.lattice_cols = max_lj + 1;
  field.lattice.assign(static_cast<std::size_t>(field.lattice_rows) * field.lattice_cols, -1);
  field.features.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t k = static_cast<std::size_t>((r.cell.row - origin.row) / stride) * field.lattice_cols +
                          static_cast<std::size_t>((r.cell.col - origin.col) / stride);
    if (field.lattice[k] >= 0) throw DataError("duplicate feature site");
    field.lattice[k] = static_cast<int>(i);
    field.sites.push_back(r.cell);
    field.positions.push_back(grid.cell_center(r.cell));
    for (int j = 0; j < dim; ++j) field.features(j, static_cast<Eigen::Index>(i)) = r.f[static_cast<std::size_t>(j)];
  }
  return field;
}

}  // namespace bathyplan
