#include "heisflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace heisflow::fft {

namespace {

// fftw planner is not thread safe; execution of an existing plan is.
std::mutex g_plan_mutex;

struct PlanKey {
    std::size_t n;
    std::size_t howmany;
    int sign;
    bool inplace;
    auto operator<=>(const PlanKey&) const = default;
};

fftw_plan get_plan(const PlanKey& key) {
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard lock(g_plan_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const int n = static_cast<int>(key.n);
    const int howmany = static_cast<int>(key.howmany);
    std::size_t total = key.n * key.howmany;
    auto* a = fftw_alloc_complex(total);
    auto* b = key.inplace ? a : fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, a, nullptr, 1, n, b, nullptr, 1, n,
                                        key.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!key.inplace) fftw_free(b);
    fftw_free(a);
    if (!plan) throw NumericalError("fftw: failed to create plan");
    cache.emplace(key, plan);
    return plan;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
    if (in.size() != out.size()) throw ConfigError("fft: size mismatch");
    if (in.empty()) return;
    bool inplace = in.data() == out.data();
    fftw_plan plan = get_plan({in.size(), 1, sign, inplace});
    fftw_execute_dft(plan, as_fftw(const_cast<cplx*>(in.data())), as_fftw(out.data()));
}

void run_rows(std::span<cplx> data, std::size_t n, std::size_t howmany, int sign) {
    if (n * howmany != data.size()) throw ConfigError("fft: row layout mismatch");
    if (data.empty()) return;
    fftw_plan plan = get_plan({n, howmany, sign, true});
    fftw_execute_dft(plan, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }
void backward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }

void forward_rows(std::span<cplx> data, std::size_t n, std::size_t howmany) {
    run_rows(data, n, howmany, FFTW_FORWARD);
}
void backward_rows(std::span<cplx> data, std::size_t n, std::size_t howmany) {
    run_rows(data, n, howmany, FFTW_BACKWARD);
}

std::size_t good_size(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.empty() || b.empty()) return {};
    std::size_t len = a.size() + b.size() - 1;
    std::size_t n = good_size(len);
    std::vector<cplx> fa(n), fb(n);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    forward(fa, fa);
    forward(fb, fb);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    backward(fa, fa);
    fa.resize(len);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : fa) x *= scale;
    return fa;
}

}  // namespace heisflow::fft
