#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "torsoseg/tiler.hpp"

namespace torsoseg {

namespace {

std::int64_t voxels(const PatchInput& p) { return p.shape[0] * p.shape[1] * p.shape[2]; }

class ConstantOracle final : public PatchOracle {
 public:
  explicit ConstantOracle(int c) : class_(c) {}
  int num_classes() const override { return std::max(2, class_ + 1); }
  void evaluate(const PatchInput& p, std::span<float> scores) override {
    const auto n = voxels(p);
    std::fill(scores.begin(), scores.end(), 0.0f);
    std::fill_n(scores.begin() + class_ * n, n, 1.0f);
  }

 private:
  int class_;
};

class ThresholdOracle final : public PatchOracle {
 public:
  explicit ThresholdOracle(float t) : threshold_(t) {}
  int num_classes() const override { return 2; }
  void evaluate(const PatchInput& p, std::span<float> scores) override {
    const auto n = voxels(p);
    for (std::int64_t i = 0; i < n; ++i) {
      const bool hit = p.image[i] > threshold_;
      scores[i] = hit ? 0.0f : 1.0f;
      scores[n + i] = hit ? 1.0f : 0.0f;
    }
  }

 private:
  float threshold_;
};

class IdentityOracle final : public PatchOracle {
 public:
  explicit IdentityOracle(int classes) : classes_(classes) {}
  int num_classes() const override { return classes_; }
  void evaluate(const PatchInput& p, std::span<float> scores) override {
    const auto n = voxels(p);
    std::fill(scores.begin(), scores.end(), 0.0f);
    for (std::int64_t i = 0; i < n; ++i) {
      const long c = std::clamp(std::lround(p.image[i]), 0L, long(classes_ - 1));
      scores[c * n + i] = 1.0f;
    }
  }

 private:
  int classes_;
};

class CheckerboardOracle final : public PatchOracle {
 public:
  int num_classes() const override { return 2; }
  void evaluate(const PatchInput& p, std::span<float> scores) override {
    const auto n = voxels(p);
    std::int64_t i = 0;
    for (std::int64_t z = 0; z < p.shape[2]; ++z)
      for (std::int64_t y = 0; y < p.shape[1]; ++y)
        for (std::int64_t x = 0; x < p.shape[0]; ++x, ++i) {
          const bool odd = ((p.origin[0] + x + p.origin[1] + y + p.origin[2] + z) & 1) != 0;
          scores[i] = odd ? 0.0f : 1.0f;
          scores[n + i] = odd ? 1.0f : 0.0f;
        }
  }
};

void write_all(int fd, const void* data, std::size_t n) {
  const auto* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("oracle process write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_all(int fd, void* data, std::size_t n) {
  auto* p = static_cast<char*>(data);
  while (n > 0) {
    const ssize_t r = ::read(fd, p, n);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("oracle process read failed: ") + std::strerror(errno));
    }
    if (r == 0) throw IoError("oracle process closed its output mid-response");
    p += r;
    n -= static_cast<std::size_t>(r);
  }
}

class SubprocessOracle final : public PatchOracle {
 public:
  SubprocessOracle(const std::string& command, int classes) : classes_(classes) {
    if (classes < 2) throw ValidationError("subprocess oracle needs num_classes >= 2");
    std::signal(SIGPIPE, SIG_IGN);
    int in[2], out[2];
    if (::pipe(in) != 0 || ::pipe(out) != 0) throw IoError("cannot create pipes for oracle process");
    pid_ = ::fork();
    if (pid_ < 0) throw IoError("cannot fork oracle process");
    if (pid_ == 0) {
      ::dup2(in[0], STDIN_FILENO);
      ::dup2(out[1], STDOUT_FILENO);
      ::close(in[0]), ::close(in[1]), ::close(out[0]), ::close(out[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    to_child_ = in[1];
    from_child_ = out[0];
    ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
    ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  }

  ~SubprocessOracle() override {
    ::close(to_child_);
    ::close(from_child_);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }

  int num_classes() const override { return classes_; }

  void evaluate(const PatchInput& p, std::span<float> scores) override {
    const auto n = voxels(p);
    const std::int32_t channels = p.quadrants.empty() ? 1 : 2;
    const std::int32_t header[7] = {channels,
                                    std::int32_t(p.shape[0]), std::int32_t(p.shape[1]), std::int32_t(p.shape[2]),
                                    std::int32_t(p.origin[0]), std::int32_t(p.origin[1]), std::int32_t(p.origin[2])};
    write_all(to_child_, "TSPR", 4);
    write_all(to_child_, header, sizeof(header));
    write_all(to_child_, p.image.data(), std::size_t(n) * sizeof(float));
    if (channels == 2) write_all(to_child_, p.quadrants.data(), std::size_t(n) * sizeof(float));

    char magic[4];
    std::int32_t reply[4];
    read_all(from_child_, magic, 4);
    if (std::memcmp(magic, "TSPS", 4) != 0) throw IoError("oracle response has a bad magic");
    read_all(from_child_, reply, sizeof(reply));
    if (reply[0] != classes_ || reply[1] != p.shape[0] || reply[2] != p.shape[1] || reply[3] != p.shape[2])
      throw IoError("oracle response header does not match the request (classes " +
                    std::to_string(reply[0]) + ", expected " + std::to_string(classes_) + ")");
    read_all(from_child_, scores.data(), std::size_t(classes_) * std::size_t(n) * sizeof(float));
  }

 private:
  int classes_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

template <typename T>
T parse_number(std::string_view s, const std::string& spec) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError("bad number in oracle spec: " + spec);
  return v;
}

}  // namespace

std::unique_ptr<PatchOracle> constant_oracle(int class_id) {
  if (class_id < 0) throw ValidationError("constant oracle class must be nonnegative");
  return std::make_unique<ConstantOracle>(class_id);
}

std::unique_ptr<PatchOracle> threshold_oracle(float threshold) {
  return std::make_unique<ThresholdOracle>(threshold);
}

std::unique_ptr<PatchOracle> identity_oracle(int num_classes) {
  if (num_classes < 2) throw ValidationError("identity oracle needs at least two classes");
  return std::make_unique<IdentityOracle>(num_classes);
}

std::unique_ptr<PatchOracle> checkerboard_oracle() { return std::make_unique<CheckerboardOracle>(); }

std::unique_ptr<PatchOracle> subprocess_oracle(const std::string& command, int num_classes) {
  return std::make_unique<SubprocessOracle>(command, num_classes);
}

std::unique_ptr<PatchOracle> make_oracle(const std::string& spec, int num_classes) {
  if (spec.rfind("exec:", 0) == 0) {
    if (num_classes <= 0) throw ValidationError("exec oracle needs the number of classes");
    return subprocess_oracle(spec.substr(5), num_classes);
  }
  const std::string_view s(spec);
  if (s == "mock:checkerboard") return checkerboard_oracle();
  if (s.rfind("mock:constant:", 0) == 0) return constant_oracle(parse_number<int>(s.substr(14), spec));
  if (s.rfind("mock:identity:", 0) == 0) return identity_oracle(parse_number<int>(s.substr(14), spec));
  if (s.rfind("mock:threshold:", 0) == 0) return threshold_oracle(parse_number<float>(s.substr(15), spec));
  throw ValidationError("unknown oracle spec '" + spec +
                        "' (expected mock:constant:<c>, mock:threshold:<t>, mock:identity:<n>, mock:checkerboard or exec:<cmd>)");
}

}  // namespace torsoseg
