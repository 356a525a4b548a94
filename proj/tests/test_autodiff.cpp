#include <doctest.h>

#include <Eigen/Dense>

#include "ctrpo/autodiff.hpp"
#include "ctrpo/rng.hpp"
#include "gradcheck.hpp"

using ctrpo::Rng;
using ctrpo::ad::Tape;
using ctrpo::ad::Var;
using testutil::check_gradients;
using testutil::ScalarBuild;

namespace {

constexpr int kCasesPerPrimitive = 100;

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo = -2.0, double hi = 2.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

int random_dim(Rng& rng) { return 1 + static_cast<int>(rng.next() % 4); }

// Repeats a gradient check over seeded random shapes and values.
void primitive_cases(const char* name, uint64_t seed,
                     const std::function<void(Rng&, int)>& one_case) {
    Rng rng(seed);
    for (int c = 0; c < kCasesPerPrimitive; ++c) {
        INFO(name << " case " << c);
        one_case(rng, c);
    }
}

void require_ok(const testutil::GradCheckResult& r) {
    INFO(r.detail);
    REQUIRE(r.ok);
}

}  // namespace

TEST_SUITE("autodiff") {

TEST_CASE("elementwise unary primitives match finite differences") {
    auto unary_case = [](const char* which) {
        return [which](Rng& rng, int) {
            const int m = random_dim(rng);
            const int n = random_dim(rng);
            Eigen::MatrixXd x = random_matrix(rng, m, n);
            if (std::string(which) == "log") x = random_matrix(rng, m, n, 0.2, 3.0);
            if (std::string(which) == "relu") {
                // keep inputs away from the kink where the derivative jumps
                x = x.unaryExpr([](double v) { return std::abs(v) < 1e-2 ? v + 0.05 : v; });
            }
            const Eigen::MatrixXd c = random_matrix(rng, m, n);
            const std::string op = which;
            const ScalarBuild build = [&, op](Tape& t, const std::vector<Var>& in) {
                Var y = in[0];
                if (op == "tanh") y = t.tanh(y);
                if (op == "relu") y = t.relu(y);
                if (op == "exp") y = t.exp(y);
                if (op == "log") y = t.log(y);
                if (op == "neg") y = t.neg(y);
                return t.sum(t.mul(y, t.constant(c)));
            };
            require_ok(check_gradients({x}, build));
        };
    };
    primitive_cases("tanh", 11, unary_case("tanh"));
    primitive_cases("relu", 12, unary_case("relu"));
    primitive_cases("exp", 13, unary_case("exp"));
    primitive_cases("log", 14, unary_case("log"));
    primitive_cases("neg", 15, unary_case("neg"));
}

TEST_CASE("binary primitives match finite differences") {
    auto binary_case = [](const char* which) {
        return [which](Rng& rng, int) {
            const int m = random_dim(rng);
            const int n = random_dim(rng);
            const Eigen::MatrixXd a = random_matrix(rng, m, n);
            const Eigen::MatrixXd b = random_matrix(rng, m, n);
            const Eigen::MatrixXd c = random_matrix(rng, m, n);
            const std::string op = which;
            const ScalarBuild build = [&, op](Tape& t, const std::vector<Var>& in) {
                Var y = in[0];
                if (op == "add") y = t.add(in[0], in[1]);
                if (op == "sub") y = t.sub(in[0], in[1]);
                if (op == "mul") y = t.mul(in[0], in[1]);
                return t.sum(t.mul(y, t.constant(c)));
            };
            require_ok(check_gradients({a, b}, build));
        };
    };
    primitive_cases("add", 21, binary_case("add"));
    primitive_cases("sub", 22, binary_case("sub"));
    primitive_cases("mul", 23, binary_case("mul"));
}

TEST_CASE("scalar primitives match finite differences") {
    primitive_cases("scale", 31, [](Rng& rng, int) {
        const Eigen::MatrixXd x = random_matrix(rng, random_dim(rng), random_dim(rng));
        const double s = rng.uniform(-3.0, 3.0);
        require_ok(check_gradients({x}, [s](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.scale(in[0], s));
        }));
    });
    primitive_cases("add_scalar", 32, [](Rng& rng, int) {
        const int m = random_dim(rng);
        const int n = random_dim(rng);
        const Eigen::MatrixXd x = random_matrix(rng, m, n);
        const Eigen::MatrixXd c = random_matrix(rng, m, n);
        const double s = rng.uniform(-3.0, 3.0);
        require_ok(check_gradients({x}, [&, s](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.mul(t.add_scalar(in[0], s), t.constant(c)));
        }));
    });
}

TEST_CASE("shape primitives match finite differences") {
    primitive_cases("broadcast_cols", 41, [](Rng& rng, int) {
        const int m = random_dim(rng);
        const int n = random_dim(rng);
        const Eigen::MatrixXd x = random_matrix(rng, m, 1);
        const Eigen::MatrixXd c = random_matrix(rng, m, n);
        require_ok(check_gradients({x}, [&, n](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.mul(t.broadcast_cols(in[0], n), t.constant(c)));
        }));
    });
    primitive_cases("slice_rows", 42, [](Rng& rng, int) {
        const int m = 2 + static_cast<int>(rng.next() % 5);
        const Eigen::MatrixXd x = random_matrix(rng, m, 1);
        const int offset = static_cast<int>(rng.next() % static_cast<uint64_t>(m));
        const int len = 1 + static_cast<int>(rng.next() % static_cast<uint64_t>(m - offset));
        const Eigen::MatrixXd c = random_matrix(rng, len, 1);
        require_ok(check_gradients({x}, [&, offset, len](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.mul(t.slice_rows(in[0], offset, len), t.constant(c)));
        }));
    });
    primitive_cases("sum_rows", 43, [](Rng& rng, int) {
        const int m = random_dim(rng);
        const int n = random_dim(rng);
        const Eigen::MatrixXd x = random_matrix(rng, m, n);
        const Eigen::MatrixXd c = random_matrix(rng, 1, n);
        require_ok(check_gradients({x}, [&](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.mul(t.sum_rows(in[0]), t.constant(c)));
        }));
    });
    primitive_cases("sum", 44, [](Rng& rng, int) {
        const Eigen::MatrixXd x = random_matrix(rng, random_dim(rng), random_dim(rng));
        const double s = rng.uniform(-3.0, 3.0);
        require_ok(check_gradients({x}, [s](Tape& t, const std::vector<Var>& in) {
            return t.scale(t.sum(in[0]), s);
        }));
    });
}

TEST_CASE("affine matches finite differences for both arguments") {
    primitive_cases("affine", 51, [](Rng& rng, int) {
        const int in_dim = random_dim(rng);
        const int out_dim = random_dim(rng);
        const int n = random_dim(rng);
        const int offset = static_cast<int>(rng.next() % 3);
        const int tail_pad = static_cast<int>(rng.next() % 3);
        const int total = offset + out_dim * in_dim + out_dim + tail_pad;
        const Eigen::MatrixXd params = random_matrix(rng, total, 1);
        const Eigen::MatrixXd x = random_matrix(rng, in_dim, n);
        const Eigen::MatrixXd c = random_matrix(rng, out_dim, n);
        require_ok(check_gradients({params, x}, [&](Tape& t, const std::vector<Var>& in) {
            return t.sum(t.mul(t.affine(in[0], offset, out_dim, in_dim, in[1]), t.constant(c)));
        }));
    });
}

TEST_CASE("adjoints accumulate when a node fans out") {
    primitive_cases("fanout", 61, [](Rng& rng, int) {
        const Eigen::MatrixXd x = random_matrix(rng, random_dim(rng), random_dim(rng));
        // x appears three times: through tanh, through mul(x, x), and directly.
        require_ok(check_gradients({x}, [](Tape& t, const std::vector<Var>& in) {
            const Var y = t.add(t.tanh(in[0]), t.mul(in[0], in[0]));
            return t.sum(t.add(y, in[0]));
        }));
    });
}

TEST_CASE("constants receive no gradient and block backpropagation") {
    Tape tape;
    const Var x = tape.leaf(Eigen::MatrixXd::Constant(2, 2, 1.5));
    const Var c = tape.constant(Eigen::MatrixXd::Constant(2, 2, 3.0));
    const Var loss = tape.sum(tape.mul(x, c));
    tape.backward(loss);
    CHECK(tape.adjoint(x).isApprox(Eigen::MatrixXd::Constant(2, 2, 3.0)));
    CHECK_THROWS_AS((void)tape.adjoint(c), std::logic_error);
}

TEST_CASE("backward rejects non-scalar and non-finite losses") {
    Tape tape;
    const Var x = tape.leaf(Eigen::MatrixXd::Constant(2, 2, 1.0));
    CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);

    Tape tape2;
    const Var y = tape2.leaf(Eigen::MatrixXd::Constant(1, 1, -1.0));
    const Var bad = tape2.sum(tape2.log(y));  // log of a negative number
    CHECK_THROWS_AS(tape2.backward(bad), std::runtime_error);
}

TEST_CASE("shape and range violations are rejected at op creation") {
    Tape tape;
    const Var a = tape.leaf(Eigen::MatrixXd::Zero(2, 2));
    const Var b = tape.leaf(Eigen::MatrixXd::Zero(3, 2));
    CHECK_THROWS_AS((void)tape.add(a, b), std::invalid_argument);
    CHECK_THROWS_AS((void)tape.mul(a, b), std::invalid_argument);

    const Var v = tape.leaf(Eigen::MatrixXd::Zero(4, 1));
    CHECK_THROWS_AS((void)tape.slice_rows(v, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)tape.broadcast_cols(a, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)tape.affine(v, 0, 2, 2, a), std::invalid_argument);

    Eigen::MatrixXd nan(1, 1);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS((void)tape.leaf(nan), std::invalid_argument);
}

TEST_CASE("unreached nodes report missing adjoints") {
    Tape tape;
    const Var x = tape.leaf(Eigen::MatrixXd::Constant(1, 1, 2.0));
    const Var orphan = tape.leaf(Eigen::MatrixXd::Constant(1, 1, 5.0));
    tape.backward(tape.sum(x));
    CHECK(tape.adjoint(x)(0, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)tape.adjoint(orphan), std::logic_error);
}

}  // TEST_SUITE
