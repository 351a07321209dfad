#include "xct/solver.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace xct {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

//=================================================================
// internal DPLL

// encoded literal: 2v = var v positive, 2v+1 = negated
inline int enc(Literal l) { return l.var() * 2 + (l.positive() ? 0 : 1); }
inline int neg(int el) { return el ^ 1; }
inline int evar(int el) { return el >> 1; }

class DpllRun {
public:
  DpllRun(const Cnf& f, const DpllLimits& limits)
      : f_(f), limits_(limits), n_(f.var_count()), assign_(n_ + 1, 0),
        watchers_(2 * n_ + 2) {}

  SolveResult run() {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    res.status = search();
    if (res.status == SolveStatus::SAT) {
      std::vector<bool> w(n_);
      for (int v = 1; v <= n_; ++v) w[v - 1] = assign_[v] > 0;
      if (!satisfies(f_, w))
        throw std::logic_error("internal solver produced a bad witness");
      res.witness = std::move(w);
    }
    if (res.status == SolveStatus::UNKNOWN) res.note = "decision limit reached";
    res.stats.decisions = decisions_;
    res.stats.propagations = propagations_;
    res.stats.wall_ms = ms_since(t0);
    return res;
  }

private:
  int8_t value(int el) const {
    int8_t a = assign_[evar(el)];
    return (el & 1) ? static_cast<int8_t>(-a) : a;
  }

  // false on conflict with the existing assignment
  bool enqueue(int el) {
    int8_t v = value(el);
    if (v > 0) return true;
    if (v < 0) return false;
    assign_[evar(el)] = (el & 1) ? -1 : 1;
    trail_.push_back(el);
    return true;
  }

  bool load() {
    for (const Clause& c : f_.clauses()) {
      if (c.empty()) return false;
      if (c.size() == 1) {
        if (!enqueue(enc(c.lits()[0]))) return false;
        continue;
      }
      int begin = static_cast<int>(lits_.size());
      for (Literal l : c.lits()) lits_.push_back(enc(l));
      spans_.push_back({begin, static_cast<int>(lits_.size())});
      int ci = static_cast<int>(spans_.size()) - 1;
      watchers_[lits_[begin]].push_back(ci);
      watchers_[lits_[begin + 1]].push_back(ci);
    }
    return true;
  }

  // two-watched-literal unit propagation; false on conflict
  bool propagate() {
    while (qhead_ < trail_.size()) {
      int falsified = neg(trail_[qhead_++]);
      std::vector<int>& wl = watchers_[falsified];
      size_t keep = 0;
      for (size_t idx = 0; idx < wl.size(); ++idx) {
        int ci = wl[idx];
        auto [b, e] = spans_[ci];
        if (lits_[b] == falsified) std::swap(lits_[b], lits_[b + 1]);
        // now lits_[b+1] == falsified
        if (value(lits_[b]) > 0) { wl[keep++] = ci; continue; }
        bool moved = false;
        for (int j = b + 2; j < e; ++j) {
          if (value(lits_[j]) >= 0) {
            std::swap(lits_[b + 1], lits_[j]);
            watchers_[lits_[b + 1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        wl[keep++] = ci;
        ++propagations_;
        if (!enqueue(lits_[b])) {
          // compact the rest before reporting the conflict
          for (++idx; idx < wl.size(); ++idx) wl[keep++] = wl[idx];
          wl.resize(keep);
          return false;
        }
      }
      wl.resize(keep);
    }
    return true;
  }

  void undo_to(size_t pos) {
    while (trail_.size() > pos) {
      assign_[evar(trail_.back())] = 0;
      trail_.pop_back();
    }
    qhead_ = pos;
  }

  SolveStatus search() {
    if (!load()) return SolveStatus::UNSAT;

    struct Decision {
      size_t trail_pos;
      int var;
      bool flipped;
    };
    std::vector<Decision> decs;
    int cursor = 1; // branching scans upward from here

    bool ok = propagate();
    for (;;) {
      if (!ok) {
        while (!decs.empty() && decs.back().flipped) {
          undo_to(decs.back().trail_pos);
          decs.pop_back();
        }
        if (decs.empty()) return SolveStatus::UNSAT;
        Decision& d = decs.back();
        undo_to(d.trail_pos);
        d.flipped = true;
        cursor = d.var;
        enqueue(2 * d.var); // second branch: true
        ok = propagate();
        continue;
      }
      if (trail_.size() == static_cast<size_t>(n_)) return SolveStatus::SAT;
      while (assign_[cursor] != 0) ++cursor;
      if (limits_.max_decisions && decisions_ >= limits_.max_decisions)
        return SolveStatus::UNKNOWN;
      ++decisions_;
      decs.push_back({trail_.size(), cursor, false});
      enqueue(2 * cursor + 1); // first branch: false
      ok = propagate();
    }
  }

  const Cnf& f_;
  DpllLimits limits_;
  int n_;
  std::vector<int8_t> assign_;
  std::vector<int> lits_;
  std::vector<std::pair<int, int>> spans_;
  std::vector<std::vector<int>> watchers_;
  std::vector<int> trail_;
  size_t qhead_ = 0;
  uint64_t decisions_ = 0;
  uint64_t propagations_ = 0;
};

} // namespace

SolveResult DpllSolver::decide(const Cnf& f) {
  DpllRun run(f, limits_);
  return run.run();
}

//=================================================================
// external adapter

namespace {

struct TempCnfFile {
  std::string path;
  explicit TempCnfFile(const Cnf& f) {
    char tmpl[] = "/tmp/xct-query-XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw std::runtime_error("mkstemp failed");
    path = tmpl;
    std::string text = emit_dimacs(f);
    const char* data = text.data();
    size_t left = text.size();
    while (left > 0) {
      ssize_t w = write(fd, data, left);
      if (w < 0) {
        if (errno == EINTR) continue;
        close(fd);
        throw std::runtime_error("write to temp file failed");
      }
      data += w;
      left -= static_cast<size_t>(w);
    }
    close(fd);
  }
  ~TempCnfFile() { unlink(path.c_str()); }
};

// reads until EOF or deadline; returns false on timeout (child killed)
bool drain_child(int fd, pid_t pid, double timeout_s, std::string& out) {
  auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  char buf[4096];
  for (;;) {
    auto left = std::chrono::duration<double, std::milli>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      kill(pid, SIGKILL);
      return false;
    }
    struct pollfd pfd{fd, POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(left) + 1);
    if (pr < 0) {
      if (errno == EINTR) continue;
      kill(pid, SIGKILL);
      return false;
    }
    if (pr == 0) continue;
    ssize_t r = read(fd, buf, sizeof buf);
    if (r < 0) {
      if (errno == EINTR) continue;
      return true;
    }
    if (r == 0) return true;
    if (out.size() < (16u << 20)) out.append(buf, static_cast<size_t>(r));
  }
}

} // namespace

ExternalSolver::ExternalSolver(std::string executable, double timeout_seconds)
    : executable_(std::move(executable)), timeout_seconds_(timeout_seconds) {
  if (access(executable_.c_str(), X_OK) != 0)
    throw ConfigError("solver executable not found or not executable: " +
                      executable_);
}

SolveResult ExternalSolver::decide(const Cnf& f) {
  auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  TempCnfFile tmp(f);

  int pipefd[2];
  if (pipe(pipefd) != 0) {
    res.note = "pipe failed";
    return res;
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    res.note = "fork failed";
    return res;
  }
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    dup2(pipefd[1], STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execl(executable_.c_str(), executable_.c_str(), tmp.path.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipefd[1]);

  std::string output;
  bool finished = drain_child(pipefd[0], pid, timeout_seconds_, output);
  close(pipefd[0]);
  int wstatus = 0;
  while (waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {}
  res.stats.wall_ms = ms_since(t0);

  if (!finished) {
    res.note = "timeout after " + std::to_string(timeout_seconds_) + "s";
    return res;
  }
  if (!WIFEXITED(wstatus)) {
    res.note = "solver terminated abnormally";
    return res;
  }
  int code = WEXITSTATUS(wstatus);
  if (code == 20) {
    res.status = SolveStatus::UNSAT;
    return res;
  }
  if (code != 10) {
    res.note = "unexpected exit code " + std::to_string(code);
    return res;
  }

  // exit 10: SAT; harvest 'v' lines if the solver printed a model
  std::vector<int> model;
  bool saw_model_line = false;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.size() < 1 || line[0] != 'v') continue;
    if (line.size() > 1 && !isspace(static_cast<unsigned char>(line[1]))) continue;
    saw_model_line = true;
    std::istringstream ls(line.substr(1));
    int lit;
    while (ls >> lit) model.push_back(lit);
  }
  res.status = SolveStatus::SAT;
  if (!saw_model_line) return res; // decide-only solver: SAT, no witness

  std::vector<bool> w(f.var_count(), false);
  for (int lit : model) {
    if (lit == 0) break;
    int v = lit < 0 ? -lit : lit;
    if (v < 1 || v > f.var_count()) {
      res.status = SolveStatus::UNKNOWN;
      res.note = "model literal out of range: " + std::to_string(lit);
      return res;
    }
    w[v - 1] = lit > 0;
  }
  if (!satisfies(f, w)) {
    res.status = SolveStatus::UNKNOWN;
    res.note = "reported model does not satisfy the formula";
    return res;
  }
  res.witness = std::move(w);
  return res;
}

OracleFactory internal_oracle(DpllLimits limits) {
  return [limits]() { return std::make_unique<DpllSolver>(limits); };
}

OracleFactory external_oracle(std::string executable, double timeout_seconds) {
  // construct once up front so a bad path fails here, not inside a run
  auto probe = std::make_shared<ExternalSolver>(executable, timeout_seconds);
  return [executable, timeout_seconds]() {
    return std::make_unique<ExternalSolver>(executable, timeout_seconds);
  };
}

//=================================================================
// counting

uint64_t exact_count(const Cnf& f, int budget_bits) {
  int n = f.var_count();
  if (n > budget_bits || n > 31)
    throw ResourceError("exact enumeration over " + std::to_string(n) +
                        " variables exceeds the budget of " +
                        std::to_string(std::min(budget_bits, 31)));
  struct Masks {
    uint32_t pos, neg;
  };
  std::vector<Masks> clauses;
  clauses.reserve(f.clause_count());
  for (const Clause& c : f.clauses()) {
    Masks m{0, 0};
    for (Literal l : c.lits()) {
      uint32_t bit = 1u << (l.var() - 1);
      if (l.positive())
        m.pos |= bit;
      else
        m.neg |= bit;
    }
    clauses.push_back(m);
  }
  uint64_t count = 0;
  const uint64_t space = 1ull << n;
  for (uint64_t x = 0; x < space; ++x) {
    bool ok = true;
    for (const Masks& m : clauses) {
      if ((x & m.pos) == 0 && (~x & m.neg) == 0) { ok = false; break; }
    }
    count += ok;
  }
  return count;
}

uint64_t count_up_to(const Cnf& f, uint64_t cap, SatOracle& oracle,
                     uint64_t* queries) {
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  Cnf work = f;
  uint64_t found = 0;
  while (found < cap) {
    SolveResult res = oracle.decide(work);
    if (queries) ++*queries;
    if (res.status == SolveStatus::UNSAT) break;
    if (res.status == SolveStatus::UNKNOWN)
      throw CountingError("oracle gave up during enumeration: " + res.note);
    if (!res.witness)
      throw CountingError("oracle reported SAT without a model; enumeration "
                          "needs witnesses");
    ++found;
    const std::vector<bool>& w = *res.witness;
    std::vector<Literal> block;
    block.reserve(f.var_count());
    for (int v = 1; v <= f.var_count(); ++v)
      block.push_back(Literal::make(v, !w[v - 1]));
    work.add(Clause(std::move(block)));
  }
  return found;
}

} // namespace xct
