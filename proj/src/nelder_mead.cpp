#include "qcap/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace qcap {

NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& x0,
                                      const NelderMeadOptions& options) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    int evals = 0;
    const auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        return f(x);
    };

    for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += options.initial_step;
    for (Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<Eigen::Index> order(n + 1);
    bool converged = false;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        // stable_sort keeps the run deterministic when values tie
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
        {
            std::vector<Eigen::VectorXd> p2(n + 1);
            std::vector<double> v2(n + 1);
            for (Eigen::Index i = 0; i <= n; ++i) {
                p2[i] = pts[order[i]];
                v2[i] = vals[order[i]];
            }
            pts.swap(p2);
            vals.swap(v2);
        }

        double diameter = 0.0;
        for (Eigen::Index i = 1; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[0]).norm());
        if (diameter < options.diameter_tol) {
            converged = true;
            break;
        }
        if (evals >= options.max_evaluations) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd& worst = pts[n];
        const Eigen::VectorXd xr = centroid + (centroid - worst);
        const double fr = eval(xr);
        if (fr < vals[0]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        const bool outside = fr < vals[n];
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (worst - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : vals[n])) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for (Eigen::Index i = 1; i <= n; ++i) {
            pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
            vals[i] = eval(pts[i]);
        }
    }
    return {pts[0], vals[0], evals, converged};
}

}  // namespace qcap
