#include "cis/algorithms.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "cis/error.hpp"

namespace cis {

using geometry::PolyUnion;
using geometry::Polytope;

namespace {

using Clock = std::chrono::steady_clock;
using Classifier = std::function<Classification(const Box&, const BoxUnion& reach, const BoxUnion& fit)>;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double box_volume(const std::vector<Box>& boxes) {
  double v = 0.0;
  for (const auto& b : boxes) v += b.volume();
  return v;
}

// Target used for containment; eroded when a robustness margin is asked for.
BoxUnion fit_target(const BoxUnion& omega, double margin_r) {
  return margin_r > 0.0 ? erode(omega, margin_r) : omega;
}

// Depth-first refinement of one root box, in the exact order of a single
// queue with pushfront of both children.
struct Subtree {
  std::vector<Box> inside;
  ControllerTable controller;
  std::vector<Box> excluded;
  std::vector<Box> indeterminate;
  std::size_t pops = 0;
};

Subtree refine(const Box& root, const BoxUnion& reach, const BoxUnion& fit, const Classifier& classify_box) {
  Subtree out;
  std::deque<Box> queue{root};
  while (!queue.empty()) {
    Box x = std::move(queue.front());
    queue.pop_front();
    ++out.pops;
    Classification c = classify_box(x, reach, fit);
    std::visit(Overloaded{
                   [&](outcome::Disjoint&) { out.excluded.push_back(x); },
                   [&](outcome::Inside& in) {
                     out.inside.push_back(x);
                     out.controller.push_back({x, std::move(in.inputs)});
                   },
                   [&](outcome::Indeterminate&) { out.indeterminate.push_back(x); },
                   [&](outcome::Split& s) {
                     queue.push_front(std::move(s.left));
                     queue.push_front(std::move(s.right));
                   },
               },
               c);
  }
  return out;
}

RunResult sweep(const BoxUnion& omega, const Options& opt, const Classifier& classify_box) {
  RunResult res;
  res.cis = BoxUnion(omega.dim());
  const BoxUnion fit = fit_target(omega, opt.margin_r);
  const BoxUnion& fit_ref = opt.margin_r > 0.0 ? fit : omega;
  const auto& roots = omega.boxes();
  std::vector<Subtree> trees(roots.size());

  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(opt.threads, 1), roots.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < roots.size(); ++i) trees[i] = refine(roots[i], omega, fit_ref, classify_box);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < roots.size(); i = next++) {
          try {
            trees[i] = refine(roots[i], omega, fit_ref, classify_box);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (auto& t : trees) {
    for (auto& b : t.inside) res.cis.add(std::move(b));
    for (auto& e : t.controller) res.controller.push_back(std::move(e));
    for (auto& b : t.excluded) res.excluded.push_back(std::move(b));
    for (auto& b : t.indeterminate) res.indeterminate.push_back(std::move(b));
    res.stats.pops += t.pops;
  }
  res.stats.sweeps = 1;
  return res;
}

bool same_set(const BoxUnion& a, const BoxUnion& b) {
  if (a.boxes() == b.boxes()) return true;
  // Sweeps only remove material, so equal volume means equal sets.
  const double va = a.volume();
  const double vb = b.volume();
  return std::abs(va - vb) <= 1e-12 * std::max(va, vb);
}

void finish_stats(RunResult& res, const BoxUnion& omega, const SystemModel& model, const Options& opt,
                  Clock::time_point start) {
  res.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  res.stats.epsilon = opt.epsilon;
  res.stats.omega_volume = omega.volume();
  res.stats.cis_volume = res.cis.volume();
  res.stats.excluded_volume = box_volume(res.excluded);
  res.stats.indeterminate_volume = box_volume(res.indeterminate);
  if (!omega.empty()) {
    res.stats.rho = width_bounds(model, omega).rho;
    res.stats.r = res.stats.rho * opt.epsilon;
  }
}

RunResult iterate_to_fixpoint(const BoxUnion& omega, const SystemModel& model, const Options& opt,
                              const Classifier& classify_box) {
  const auto start = Clock::now();
  RunResult total;
  BoxUnion current = omega;
  std::size_t pops = 0;
  std::size_t sweeps = 0;
  std::vector<Box> excluded;
  std::vector<Box> indeterminate;
  for (;;) {
    RunResult step = sweep(current, opt, classify_box);
    pops += step.stats.pops;
    ++sweeps;
    excluded.insert(excluded.end(), step.excluded.begin(), step.excluded.end());
    indeterminate.insert(indeterminate.end(), step.indeterminate.begin(), step.indeterminate.end());
    const bool done = same_set(step.cis, current);
    current = std::move(step.cis);
    if (done) {
      total.controller = std::move(step.controller);
      break;
    }
  }
  total.cis = std::move(current);
  total.excluded = std::move(excluded);
  total.indeterminate = std::move(indeterminate);
  total.stats.pops = pops;
  total.stats.sweeps = sweeps;
  finish_stats(total, omega, model, opt, start);
  return total;
}

void check_options(const Options& opt) {
  if (!(opt.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (opt.margin_r < 0.0) throw DomainError("margin_r must be non-negative");
}

Classifier polytope_classifier(const SystemModel& model, double epsilon) {
  return [&model, epsilon](const Box& x, const BoxUnion& reach, const BoxUnion& fit) {
    return classify(x, reach, fit, model, epsilon);
  };
}

}  // namespace

RunResult under_I(const BoxUnion& omega, const SystemModel& model, const Options& opt) {
  check_options(opt);
  const auto start = Clock::now();
  RunResult res = sweep(omega, opt, polytope_classifier(model, opt.epsilon));
  finish_stats(res, omega, model, opt, start);
  return res;
}

RunResult fixpoint(const BoxUnion& omega, const SystemModel& model, const Options& opt) {
  check_options(opt);
  return iterate_to_fixpoint(omega, model, opt, polytope_classifier(model, opt.epsilon));
}

RunResult accelerated(const BoxUnion& omega_in, const SystemModel& model, const Options& opt) {
  check_options(opt);
  const auto start = Clock::now();
  struct Entry {
    Box box;
    bool checked = false;
    Box reach;
    PolyUnion inputs;
  };
  RunResult res;
  BoxUnion omega = omega_in;
  BoxUnion eroded;
  std::uint64_t eroded_at = 0;
  auto fit = [&]() -> const BoxUnion& {
    if (opt.margin_r <= 0.0) return omega;
    if (eroded_at != omega.version() + 1) {
      eroded = erode(omega, opt.margin_r);
      eroded_at = omega.version() + 1;
    }
    return eroded;
  };

  std::deque<Entry> queue;
  for (const auto& b : omega.boxes()) queue.push_back({b, false, Box(), PolyUnion(model.m)});
  std::size_t checked = 0;
  auto remove = [&](const Box& x) {
    const auto before = omega.version();
    omega.subtract(x);
    if (omega.version() == before) return;
    for (auto& e : queue) {
      if (!e.checked) continue;
      // With a margin the eroded target changes up to margin_r away from x.
      if (opt.local_checks && !e.reach.inflated(opt.margin_r)->intersects(x)) continue;
      e.checked = false;
      --checked;
    }
  };

  while (checked < queue.size()) {
    Entry e = std::move(queue.front());
    queue.pop_front();
    if (e.checked) {
      // Still valid against the current omega; nothing to redo.
      queue.push_back(std::move(e));
      continue;
    }
    ++res.stats.pops;
    Classification c = classify(e.box, omega, fit(), model, opt.epsilon);
    if (std::holds_alternative<outcome::Disjoint>(c)) {
      res.excluded.push_back(e.box);
      remove(e.box);
    } else if (auto* in = std::get_if<outcome::Inside>(&c)) {
      e.checked = true;
      e.reach = std::move(in->reach);
      e.inputs = std::move(in->inputs);
      queue.push_back(std::move(e));
      ++checked;
    } else if (std::holds_alternative<outcome::Indeterminate>(c)) {
      res.indeterminate.push_back(e.box);
      remove(e.box);
    } else {
      auto& s = std::get<outcome::Split>(c);
      queue.push_front({std::move(s.left), false, Box(), PolyUnion(model.m)});
      queue.push_front({std::move(s.right), false, Box(), PolyUnion(model.m)});
    }
  }

  res.cis = BoxUnion(omega_in.dim());
  for (auto& e : queue) {
    res.cis.add(e.box);
    res.controller.push_back({std::move(e.box), std::move(e.inputs)});
  }
  res.stats.sweeps = 1;
  finish_stats(res, omega_in, model, opt, start);
  return res;
}

std::vector<std::vector<double>> input_grid(const Box& U, std::size_t n_u) {
  if (n_u == 0) throw DomainError("n_u must be at least 1");
  std::vector<std::vector<double>> axes;
  for (const auto& I : U.axes()) {
    std::vector<double> vals;
    if (n_u == 1) {
      vals.push_back(I.mid());
    } else {
      for (std::size_t k = 0; k < n_u; ++k) {
        vals.push_back(k + 1 == n_u ? I.hi() : I.lo() + I.width() * static_cast<double>(k) / static_cast<double>(n_u - 1));
      }
    }
    axes.push_back(std::move(vals));
  }
  std::vector<std::vector<double>> grid{{}};
  for (const auto& vals : axes) {
    std::vector<std::vector<double>> next;
    for (double v : vals) {
      for (const auto& partial : grid) {
        next.push_back(partial);
        next.back().push_back(v);
      }
    }
    grid = std::move(next);
  }
  // axis 0 fastest: the loops above make the last axis fastest, so reorder.
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  return grid;
}

RunResult baseline_sampled(const BoxUnion& omega, const SystemModel& model, const Options& opt, std::size_t n_u) {
  check_options(opt);
  const auto grid = input_grid(model.U, n_u);
  const double eps = opt.epsilon;
  Classifier sampled = [&model, &grid, eps](const Box& x, const BoxUnion& reach, const BoxUnion& fit) -> Classification {
    std::vector<Interval> f0;
    std::vector<Interval> g;
    try {
      for (const auto& e : model.f0) f0.push_back(expr::eval_interval(e, x, model.inclusion));
      for (const auto& e : model.g) g.push_back(expr::eval_interval(e, x, model.inclusion));
    } catch (const DomainError& err) {
      std::ostringstream os;
      os << err.what() << " (on box " << x << ")";
      throw DomainError(os.str());
    }
    bool hits = false;
    std::vector<Interval> img(model.n);
    for (const auto& u : grid) {
      for (std::size_t k = 0; k < model.n; ++k) {
        Interval v = f0[k];
        for (std::size_t i = 0; i < model.m; ++i) v += g[k * model.m + i] * Interval(u[i]);
        img[k] = v;
      }
      const Box image(img);
      // Same slack as the polytope containment tests, so exact fits survive outward rounding.
      Box core = image;
      for (std::size_t k = 0; k < model.n; ++k) {
        const double lo = image[k].lo() + geometry::kTol, hi = image[k].hi() - geometry::kTol;
        core[k] = lo <= hi ? Interval(lo, hi) : Interval(image[k].mid());
      }
      if (fit.covers(core)) {
        PolyUnion at(model.m);
        at.add(Polytope::from_points({Eigen::Map<const geometry::Vector>(u.data(), static_cast<Eigen::Index>(u.size()))}, model.m));
        return outcome::Inside{std::move(at), image};
      }
      hits = hits || reach.intersects(image);
    }
    if (!hits) return outcome::Disjoint{};
    if (x.width() <= eps) return outcome::Indeterminate{};
    auto [l, r] = x.bisect();
    return outcome::Split{std::move(l), std::move(r)};
  };
  return iterate_to_fixpoint(omega, model, opt, sampled);
}

}  // namespace cis
