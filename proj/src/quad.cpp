#include "csim/quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace csim {

namespace {

// QUADPACK dqk15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    ++evals;
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        evals += 2;
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }
    const double value = result_kronrod * h;
    const double err = std::abs((result_kronrod - result_gauss) * h);
    return Panel{a, b, value, err};
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_intervals) {
    QuadResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    int evals = 0;
    std::priority_queue<Panel> queue;
    queue.push(evaluate_panel(f, a, b, evals));
    double total_value = queue.top().value;
    double total_error = queue.top().error;
    int intervals = 1;
    while (total_error > abs_tol && intervals < max_intervals) {
        Panel worst = queue.top();
        queue.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate_panel(f, worst.a, mid, evals);
        Panel right = evaluate_panel(f, mid, worst.b, evals);
        total_value += left.value + right.value;
        total_error += left.error + right.error;
        queue.push(left);
        queue.push(right);
        ++intervals;
    }
    res.value = total_value;
    res.abs_error = total_error;
    res.converged = total_error <= abs_tol;
    res.evaluations = evals;
    return res;
}

} // namespace csim
