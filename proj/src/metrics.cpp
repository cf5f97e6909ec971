#include "grm3d/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "grm3d/errors.hpp"
#include "grm3d/text_io.hpp"

namespace grm3d {
namespace {

std::vector<int> common_joints(const Pose3D& pred, const Pose3D& gt) {
  if (pred.joint_count() != gt.joint_count()) throw MetricError("poses have different joint counts");
  std::vector<int> idx;
  for (int j = 0; j < gt.joint_count(); ++j)
    if (pred.valid[static_cast<std::size_t>(j)] && gt.valid[static_cast<std::size_t>(j)]) idx.push_back(j);
  return idx;
}

bool root_valid(const Pose3D& p, int root) {
  return root >= 0 && root < p.joint_count() && p.valid[static_cast<std::size_t>(root)];
}

}  // namespace

Pose3D to_metric(const Pose3D& pose, double mm_per_unit) {
  Pose3D out = pose;
  for (Point3& p : out.joints) p = mm_per_unit * p;
  return out;
}

Point3 back_project(const Point3& q, const Intrinsics& k) {
  if (!(q.z > 0.0)) throw DomainError("back_project: depth must be positive");
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw DomainError("back_project: focal lengths must be positive");
  return Point3{(q.x - k.cx) * q.z / k.fx, (q.y - k.cy) * q.z / k.fy, q.z};
}

double mpjpe(const Pose3D& pred, const Pose3D& gt, bool align_root, int root_index) {
  const auto idx = common_joints(pred, gt);
  if (idx.empty()) throw MetricError("mpjpe: no joints valid in both poses");
  Point3 shift;
  if (align_root) {
    if (!root_valid(pred, root_index) || !root_valid(gt, root_index))
      throw MetricError("mpjpe: root joint missing for alignment");
    shift = gt.joints[static_cast<std::size_t>(root_index)] - pred.joints[static_cast<std::size_t>(root_index)];
  }
  double sum = 0.0;
  for (int j : idx) sum += distance(pred.joints[static_cast<std::size_t>(j)] + shift, gt.joints[static_cast<std::size_t>(j)]);
  return sum / static_cast<double>(idx.size());
}

Point3 Similarity::apply(const Point3& p) const {
  Point3 r;
  r.x = scale * (rotation[0][0] * p.x + rotation[0][1] * p.y + rotation[0][2] * p.z) + translation.x;
  r.y = scale * (rotation[1][0] * p.x + rotation[1][1] * p.y + rotation[1][2] * p.z) + translation.y;
  r.z = scale * (rotation[2][0] * p.x + rotation[2][1] * p.y + rotation[2][2] * p.z) + translation.z;
  return r;
}

Similarity procrustes_align(const Pose3D& pred, const Pose3D& gt) {
  const auto idx = common_joints(pred, gt);
  const auto n = static_cast<Eigen::Index>(idx.size());
  if (n < 3) throw MetricError("procrustes: need at least three common joints");
  Eigen::MatrixXd x(3, n), y(3, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Point3& a = pred.joints[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
    const Point3& b = gt.joints[static_cast<std::size_t>(idx[static_cast<std::size_t>(c)])];
    x.col(c) << a.x, a.y, a.z;
    y.col(c) << b.x, b.y, b.z;
  }
  const Eigen::Vector3d mx = x.rowwise().mean();
  const Eigen::Vector3d my = y.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - mx;
  const Eigen::MatrixXd yc = y.colwise() - my;

  auto collinear = [](const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto s = svd.singularValues();
    return !(s(0) > 0.0) || s(1) <= 1e-9 * s(0);
  };
  if (collinear(xc) || collinear(yc)) throw MetricError("procrustes: degenerate (collinear) joint configuration");

  const Eigen::Matrix3d cov = yc * xc.transpose() / static_cast<double>(n);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixU() * s * svd.matrixV().transpose();
  const double var_x = xc.squaredNorm() / static_cast<double>(n);
  const double scale = (svd.singularValues().asDiagonal() * s).trace() / var_x;
  const Eigen::Vector3d t = my - scale * r * mx;

  Similarity out;
  out.scale = scale;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.rotation[i][j] = r(i, j);
  out.translation = Point3{t(0), t(1), t(2)};
  return out;
}

double pa_mpjpe(const Pose3D& pred, const Pose3D& gt) {
  const Similarity sim = procrustes_align(pred, gt);
  Pose3D aligned = pred;
  for (Point3& p : aligned.joints) p = sim.apply(p);
  return mpjpe(aligned, gt, false, 0);
}

std::vector<int> match_persons(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, int root) {
  struct Pair {
    double d;
    std::size_t g, p;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!root_valid(gts[g], root)) continue;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (!root_valid(preds[p], root)) continue;
      pairs.push_back({distance(gts[g].joints[static_cast<std::size_t>(root)], preds[p].joints[static_cast<std::size_t>(root)]), g, p});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<int> match(gts.size(), -1);
  std::vector<char> used(preds.size(), 0);
  for (const Pair& pr : pairs) {
    if (match[pr.g] >= 0 || used[pr.p]) continue;
    match[pr.g] = static_cast<int>(pr.p);
    used[pr.p] = 1;
  }
  return match;
}

PckResult pck3d(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, const std::vector<int>& matching,
                double threshold_mm, PckMode mode, int root) {
  if (gts.empty()) throw MetricError("pck3d: empty ground-truth set");
  const int k = gts.front().joint_count();
  std::vector<int> joint_correct(static_cast<std::size_t>(k), 0), joint_total(static_cast<std::size_t>(k), 0);
  PckResult res;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const Pose3D& gt = gts[g];
    const Pose3D* pred = matching[g] >= 0 ? &preds[static_cast<std::size_t>(matching[g])] : nullptr;
    Point3 shift;
    bool alignable = pred != nullptr;
    if (pred && mode == PckMode::rel) {
      alignable = root_valid(*pred, root) && root_valid(gt, root);
      if (alignable) shift = gt.joints[static_cast<std::size_t>(root)] - pred->joints[static_cast<std::size_t>(root)];
    }
    for (int j = 0; j < k; ++j) {
      if (!gt.valid[static_cast<std::size_t>(j)]) continue;
      ++joint_total[static_cast<std::size_t>(j)];
      ++res.total;
      if (!alignable || !pred->valid[static_cast<std::size_t>(j)]) continue;
      const double d = distance(pred->joints[static_cast<std::size_t>(j)] + shift, gt.joints[static_cast<std::size_t>(j)]);
      if (d <= threshold_mm) {
        ++joint_correct[static_cast<std::size_t>(j)];
        ++res.correct;
      }
    }
  }
  res.percent = res.total ? 100.0 * res.correct / res.total : 0.0;
  for (int j = 0; j < k; ++j)
    res.per_joint.push_back(joint_total[static_cast<std::size_t>(j)]
                                ? 100.0 * joint_correct[static_cast<std::size_t>(j)] / joint_total[static_cast<std::size_t>(j)]
                                : 0.0);
  return res;
}

PckResult pck3d(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, double threshold_mm, PckMode mode,
                int root) {
  if (gts.empty()) throw MetricError("pck3d: empty ground-truth set");
  return pck3d(preds, gts, match_persons(preds, gts, root), threshold_mm, mode, root);
}

std::vector<double> default_auc_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 30; ++i) t.push_back(5.0 * i);
  return t;
}

double auc_pck(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, const std::vector<double>& thresholds,
               int root) {
  if (gts.empty()) throw MetricError("auc_pck: empty ground-truth set");
  if (thresholds.size() < 2) throw MetricError("auc_pck: need at least two thresholds");
  const auto matching = match_persons(preds, gts, root);
  std::vector<double> curve;
  for (double t : thresholds) curve.push_back(pck3d(preds, gts, matching, t, PckMode::rel, root).percent / 100.0);
  double area = 0.0;
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    area += 0.5 * (curve[i] + curve[i - 1]) * (thresholds[i] - thresholds[i - 1]);
  return area / (thresholds.back() - thresholds.front());
}

std::vector<double> crowd_index(const std::vector<Pose3D>& persons) {
  const double below_one = std::nextafter(1.0, 0.0);
  std::vector<double> out;
  for (std::size_t a = 0; a < persons.size(); ++a) {
    const Pose3D& me = persons[a];
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    int own = 0;
    for (int j = 0; j < me.joint_count(); ++j) {
      if (!me.valid[static_cast<std::size_t>(j)]) continue;
      const Point3& p = me.joints[static_cast<std::size_t>(j)];
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
      ++own;
    }
    int inside = 0;
    for (std::size_t b = 0; b < persons.size() && own > 0; ++b) {
      if (b == a) continue;
      for (int j = 0; j < persons[b].joint_count(); ++j) {
        if (!persons[b].valid[static_cast<std::size_t>(j)]) continue;
        const Point3& p = persons[b].joints[static_cast<std::size_t>(j)];
        if (p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1) ++inside;
      }
    }
    out.push_back(own ? std::min(static_cast<double>(inside) / own, below_one) : 0.0);
  }
  return out;
}

double mean_crowd_index(const std::vector<Pose3D>& persons) {
  const auto ci = crowd_index(persons);
  if (ci.empty()) return 0.0;
  double s = 0.0;
  for (double v : ci) s += v;
  return s / static_cast<double>(ci.size());
}

MetricReport evaluate(const std::vector<Pose3D>& preds, const std::vector<Pose3D>& gts, const EvalOptions& opt) {
  MetricReport rep;
  rep.gt_persons = static_cast<int>(gts.size());
  rep.pred_persons = static_cast<int>(preds.size());
  rep.matching = match_persons(preds, gts, opt.root_index);
  const PckResult rel = pck3d(preds, gts, rep.matching, opt.pck_threshold_mm, PckMode::rel, opt.root_index);
  rep.pck_rel = rel.percent;
  rep.per_joint_pck_rel = rel.per_joint;
  rep.pck_abs = pck3d(preds, gts, rep.matching, opt.pck_threshold_mm, PckMode::abs, opt.root_index).percent;
  rep.auc_rel = auc_pck(preds, gts, opt.auc_thresholds, opt.root_index);
  double sum_mp = 0.0, sum_pa = 0.0;
  int n_mp = 0, n_pa = 0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (rep.matching[g] < 0) continue;
    const Pose3D& pred = preds[static_cast<std::size_t>(rep.matching[g])];
    try {
      sum_mp += mpjpe(pred, gts[g], true, opt.root_index);
      ++n_mp;
    } catch (const MetricError&) {
    }
    try {
      sum_pa += pa_mpjpe(pred, gts[g]);
      ++n_pa;
    } catch (const MetricError&) {
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.mpjpe = n_mp ? sum_mp / n_mp : nan;
  rep.pa_mpjpe = n_pa ? sum_pa / n_pa : nan;
  rep.crowd_index = mean_crowd_index(gts);
  return rep;
}

std::string format_report(const MetricReport& r, const std::vector<std::string>& names) {
  auto num = [](double v) { return std::isnan(v) ? std::string("nan") : text::fmt_fixed(v, 4); };
  std::ostringstream out;
  out << "pck_rel: " << num(r.pck_rel) << "\n";
  out << "pck_abs: " << num(r.pck_abs) << "\n";
  out << "auc_rel: " << num(r.auc_rel) << "\n";
  out << "mpjpe: " << num(r.mpjpe) << "\n";
  out << "pa_mpjpe: " << num(r.pa_mpjpe) << "\n";
  out << "crowd_index: " << num(r.crowd_index) << "\n";
  out << "gt_persons: " << r.gt_persons << "\n";
  out << "pred_persons: " << r.pred_persons << "\n";
  out << "decode_failures: " << r.decode_failures << "\n";
  out << "matching:";
  for (int m : r.matching) out << ' ' << m;
  out << "\njoint pck_rel\n";
  for (std::size_t j = 0; j < r.per_joint_pck_rel.size(); ++j) {
    out << (j < names.size() ? names[j] : std::to_string(j)) << ' ' << num(r.per_joint_pck_rel[j]) << "\n";
  }
  return out.str();
}

}  // namespace grm3d
