// SPDX-License-Identifier: Apache-2.0
//
// chanforge: generative modelling of non-stationary dynamic radio channels
// Copyright (C) 2026 The chanforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CHANFORGE_NN_HPP
#define CHANFORGE_NN_HPP

// Minimal layer toolkit with hand-written backward passes. Activations are batch-major
// (rows = samples) column-major Eigen matrices; a sequence of T steps with F features per step
// is stored as B x (T*F), step t occupying the contiguous column block [t*F, (t+1)*F).

#include "chanforge/core.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace chanforge::nn
{
    template <typename S>
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

    template <typename S>
    using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

    enum class Mode
    {
        train,
        eval
    };

    // Flushes subnormal floats to zero for the lifetime of the guard (x86 SSE only).
    class FlushDenormals
    {
      public:
        FlushDenormals()
        {
#if defined(__SSE__)
            saved_ = _mm_getcsr();
            _mm_setcsr(saved_ | 0x8040u);
#endif
        }
        ~FlushDenormals()
        {
#if defined(__SSE__)
            _mm_setcsr(saved_);
#endif
        }
        FlushDenormals(const FlushDenormals &) = delete;
        FlushDenormals &operator=(const FlushDenormals &) = delete;

      private:
        unsigned int saved_ = 0;
    };

    template <typename S>
    struct Parameter
    {
        std::string name;
        Mat<S> value;
        Mat<S> grad;

        void resize(Eigen::Index rows, Eigen::Index cols)
        {
            value = Mat<S>::Zero(rows, cols);
            grad = Mat<S>::Zero(rows, cols);
        }
    };

    template <typename S>
    using ParamRefs = std::vector<Parameter<S> *>;

    template <typename S>
    inline void zero_grad(const ParamRefs<S> &ps)
    {
        for (auto *p : ps)
            p->grad.setZero();
    }

    template <typename S>
    inline S sigmoid(S x)
    {
        return S(1) / (S(1) + std::exp(-x));
    }

    template <typename Derived>
    inline auto sigmoid_array(const Eigen::ArrayBase<Derived> &x)
    {
        using S = typename Derived::Scalar;
        return (S(1) + (-x).exp()).inverse();
    }

    // Fan-in scaled uniform initialisation, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    template <typename S, typename Rng>
    void init_fan_in_uniform(Mat<S> &w, Eigen::Index fan_in, Rng &rng)
    {
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-a, a);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                w(i, j) = static_cast<S>(u(rng));
    }

    template <typename S, typename Rng>
    void init_normal(Mat<S> &w, double stddev, Rng &rng)
    {
        std::normal_distribution<double> g(0.0, stddev);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                w(i, j) = static_cast<S>(g(rng));
    }

    // Orthogonal n x n block via QR of a Gaussian matrix (sign-corrected).
    template <typename S, typename Rng>
    Mat<S> orthogonal(Eigen::Index n, Rng &rng)
    {
        Eigen::MatrixXd a(n, n);
        std::normal_distribution<double> g(0.0, 1.0);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                a(i, j) = g(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().template triangularView<Eigen::Upper>();
        for (Eigen::Index k = 0; k < n; ++k)
            if (r(k, k) < 0.0)
                q.col(k) *= -1.0;
        return q.cast<S>();
    }

    // ---------------------------------------------------------------------------------------
    // Fully connected layer y = x W + b, W is in x out.
    template <typename S>
    class Linear
    {
      public:
        Parameter<S> weight, bias;

        Linear() = default;

        template <typename Rng>
        Linear(std::string name, Eigen::Index in, Eigen::Index out, Rng &rng)
        {
            weight.name = name + ".weight";
            bias.name = name + ".bias";
            weight.resize(in, out);
            bias.resize(1, out);
            init_fan_in_uniform(weight.value, in, rng);
            init_fan_in_uniform(bias.value, in, rng);
        }

        Eigen::Index in_features() const { return weight.value.rows(); }
        Eigen::Index out_features() const { return weight.value.cols(); }

        Mat<S> forward(const Mat<S> &x)
        {
            input_ = x;
            Mat<S> y(x.rows(), out_features());
            y.noalias() = x * weight.value;
            y.rowwise() += bias.value.row(0);
            return y;
        }

        // Returns dL/dx (empty when `need_input_grad` is false).
        Mat<S> backward(const Mat<S> &dy, bool param_grads = true, bool need_input_grad = true)
        {
            if (param_grads)
            {
                weight.grad.noalias() += input_.transpose() * dy;
                bias.grad += dy.colwise().sum();
            }
            Mat<S> dx;
            if (need_input_grad)
            {
                dx.resize(dy.rows(), in_features());
                dx.noalias() = dy * weight.value.transpose();
            }
            return dx;
        }

        ParamRefs<S> params() { return {&weight, &bias}; }

      private:
        Mat<S> input_;
    };

    // ---------------------------------------------------------------------------------------
    template <typename S>
    class LeakyRelu
    {
      public:
        explicit LeakyRelu(S slope = S(0.2)) : slope_(slope) {}

        Mat<S> forward(const Mat<S> &x)
        {
            input_ = x;
            return (x.array() > S(0)).select(x, slope_ * x);
        }

        Mat<S> backward(const Mat<S> &dy) const
        {
            return (input_.array() > S(0)).select(dy, slope_ * dy);
        }

      private:
        S slope_;
        Mat<S> input_;
    };

    // ---------------------------------------------------------------------------------------
    // Inverted dropout; identity in eval mode.
    template <typename S>
    class Dropout
    {
      public:
        explicit Dropout(double rate = 0.4) : rate_(rate) {}

        template <typename Rng>
        Mat<S> forward(const Mat<S> &x, Mode mode, Rng &rng)
        {
            if (mode == Mode::eval || rate_ <= 0.0)
            {
                scale_.resize(0, 0);
                return x;
            }
            std::bernoulli_distribution keep(1.0 - rate_);
            const S s = static_cast<S>(1.0 / (1.0 - rate_));
            scale_.resize(x.rows(), x.cols());
            for (Eigen::Index k = 0; k < scale_.size(); ++k)
                scale_.data()[k] = keep(rng) ? s : S(0);
            return x.cwiseProduct(scale_);
        }

        Mat<S> backward(const Mat<S> &dy) const
        {
            return scale_.size() == 0 ? dy : Mat<S>(dy.cwiseProduct(scale_));
        }

        double rate() const { return rate_; }

      private:
        double rate_;
        Mat<S> scale_;
    };

    // ---------------------------------------------------------------------------------------
    // Batch normalisation over the batch axis. Running statistics follow
    // running = momentum * running + (1 - momentum) * batch.
    template <typename S>
    class BatchNorm
    {
      public:
        Parameter<S> gamma, beta;
        RowVec<S> running_mean, running_var;

        BatchNorm() = default;

        BatchNorm(std::string name, Eigen::Index features, double momentum = 0.8, double eps = 1e-3)
            : momentum_(momentum), eps_(eps)
        {
            gamma.name = name + ".gamma";
            beta.name = name + ".beta";
            gamma.resize(1, features);
            beta.resize(1, features);
            gamma.value.setOnes();
            running_mean = RowVec<S>::Zero(features);
            running_var = RowVec<S>::Ones(features);
        }

        Mat<S> forward(const Mat<S> &x, Mode mode)
        {
            const auto n = static_cast<S>(x.rows());
            RowVec<S> mean, var;
            if (mode == Mode::train)
            {
                mean = x.colwise().sum() / n;
                var = (x.rowwise() - mean).array().square().colwise().sum().matrix() / n;
                running_mean = S(momentum_) * running_mean + S(1.0 - momentum_) * mean;
                running_var = S(momentum_) * running_var + S(1.0 - momentum_) * var;
            }
            else
            {
                mean = running_mean;
                var = running_var;
            }
            inv_std_ = (var.array() + S(eps_)).rsqrt().matrix();
            xhat_ = (x.rowwise() - mean).array().rowwise() * inv_std_.array();
            Mat<S> y = xhat_.array().rowwise() * gamma.value.row(0).array();
            y.rowwise() += beta.value.row(0);
            train_mode_ = mode == Mode::train;
            return y;
        }

        Mat<S> backward(const Mat<S> &dy, bool param_grads = true)
        {
            if (param_grads)
            {
                gamma.grad += dy.cwiseProduct(xhat_).colwise().sum();
                beta.grad += dy.colwise().sum();
            }
            const Mat<S> dxhat = dy.array().rowwise() * gamma.value.row(0).array();
            if (!train_mode_)
                return dxhat.array().rowwise() * inv_std_.array();
            const auto n = static_cast<S>(dy.rows());
            const RowVec<S> sum_dxhat = dxhat.colwise().sum();
            const RowVec<S> sum_dxhat_xhat = dxhat.cwiseProduct(xhat_).colwise().sum();
            Mat<S> dx = (n * dxhat.array() - xhat_.array().rowwise() * sum_dxhat_xhat.array()).rowwise() -
                        sum_dxhat.array();
            dx.array().rowwise() *= inv_std_.array() / n;
            return dx;
        }

        double momentum() const { return momentum_; }

        ParamRefs<S> params() { return {&gamma, &beta}; }

      private:
        double momentum_ = 0.8;
        double eps_ = 1e-3;
        bool train_mode_ = true;
        RowVec<S> inv_std_;
        Mat<S> xhat_;
    };

    // ---------------------------------------------------------------------------------------
    // Learned class embedding; forward gathers one row per sample.
    template <typename S>
    class Embedding
    {
      public:
        Parameter<S> table;

        Embedding() = default;

        template <typename Rng>
        Embedding(std::string name, Eigen::Index n_classes, Eigen::Index dim, Rng &rng)
        {
            table.name = name + ".table";
            table.resize(n_classes, dim);
            init_normal(table.value, 1.0, rng);
        }

        Eigen::Index n_classes() const { return table.value.rows(); }

        Mat<S> forward(const std::vector<int> &labels)
        {
            labels_ = labels;
            Mat<S> out(static_cast<Eigen::Index>(labels.size()), table.value.cols());
            for (std::size_t b = 0; b < labels.size(); ++b)
            {
                if (labels[b] < 0 || labels[b] >= n_classes())
                    throw std::invalid_argument("Class label " + std::to_string(labels[b]) + " is out of range.");
                out.row(static_cast<Eigen::Index>(b)) = table.value.row(labels[b]);
            }
            return out;
        }

        void backward(const Mat<S> &dout)
        {
            for (std::size_t b = 0; b < labels_.size(); ++b)
                table.grad.row(labels_[b]) += dout.row(static_cast<Eigen::Index>(b));
        }

        ParamRefs<S> params() { return {&table}; }

      private:
        std::vector<int> labels_;
    };

    // ---------------------------------------------------------------------------------------
    // Recurrent cells. Weights act on the concatenation [h_prev, x]: rows [0, H) of `weight`
    // multiply h_prev, rows [H, H + F) multiply x.
    //
    // LSTM gate column blocks: [f | i | C~ | o], each H wide.

    template <typename S>
    struct LstmStepCache
    {
        Mat<S> x, h_prev, c_prev;
        Mat<S> f, i, g, o, c, tanh_c;
    };

    template <typename S>
    void lstm_step_forward(const Mat<S> &x, const Mat<S> &h_prev, const Mat<S> &c_prev, const Mat<S> &weight,
                           const RowVec<S> &bias, LstmStepCache<S> &k)
    {
        const Eigen::Index H = h_prev.cols();
        Mat<S> z(x.rows(), 4 * H);
        z.noalias() = h_prev * weight.topRows(H);
        z.noalias() += x * weight.bottomRows(weight.rows() - H);
        z.rowwise() += bias;
        k.x = x;
        k.h_prev = h_prev;
        k.c_prev = c_prev;
        k.f = sigmoid_array(z.middleCols(0, H).array()).matrix();
        k.i = sigmoid_array(z.middleCols(H, H).array()).matrix();
        k.g = z.middleCols(2 * H, H).array().tanh().matrix();
        k.o = sigmoid_array(z.middleCols(3 * H, H).array()).matrix();
        k.c = k.f.cwiseProduct(c_prev) + k.i.cwiseProduct(k.g);
        k.tanh_c = k.c.array().tanh().matrix();
    }

    // Backward through one LSTM step given dL/dh_t and dL/dc_t (the latter from the next step).
    // Accumulates weight/bias gradients and returns dL/dx, dL/dh_prev, dL/dc_prev.
    template <typename S>
    void lstm_step_backward(const LstmStepCache<S> &k, const Mat<S> &dh, const Mat<S> &dc_next, const Mat<S> &weight,
                            Mat<S> &dweight, RowVec<S> &dbias, Mat<S> &dx, Mat<S> &dh_prev, Mat<S> &dc_prev)
    {
        const Eigen::Index H = k.h_prev.cols();
        const Eigen::Index B = dh.rows();
        const Mat<S> dc = dc_next + dh.cwiseProduct(k.o).cwiseProduct((S(1) - k.tanh_c.array().square()).matrix());
        Mat<S> dz(B, 4 * H);
        dz.middleCols(0, H) = dc.cwiseProduct(k.c_prev).cwiseProduct((k.f.array() * (S(1) - k.f.array())).matrix());
        dz.middleCols(H, H) = dc.cwiseProduct(k.g).cwiseProduct((k.i.array() * (S(1) - k.i.array())).matrix());
        dz.middleCols(2 * H, H) = dc.cwiseProduct(k.i).cwiseProduct((S(1) - k.g.array().square()).matrix());
        dz.middleCols(3 * H, H) = dh.cwiseProduct(k.tanh_c).cwiseProduct((k.o.array() * (S(1) - k.o.array())).matrix());

        dweight.topRows(H).noalias() += k.h_prev.transpose() * dz;
        dweight.bottomRows(weight.rows() - H).noalias() += k.x.transpose() * dz;
        dbias += dz.colwise().sum();
        dh_prev.noalias() = dz * weight.topRows(H).transpose();
        dx.noalias() = dz * weight.bottomRows(weight.rows() - H).transpose();
        dc_prev = dc.cwiseProduct(k.f);
    }

    // GRU gate column blocks: [u | r | h~]; h_t = u * h_prev + (1 - u) * h~,
    // h~ = tanh([r * h_prev, x] W_h + b_h).
    template <typename S>
    struct GruStepCache
    {
        Mat<S> x, h_prev;
        Mat<S> u, r, g, rh;
    };

    template <typename S>
    void gru_step_forward(const Mat<S> &x, const Mat<S> &h_prev, const Mat<S> &weight, const RowVec<S> &bias,
                          GruStepCache<S> &k, Mat<S> &h)
    {
        const Eigen::Index H = h_prev.cols();
        const Eigen::Index F = weight.rows() - H;
        Mat<S> zur(x.rows(), 2 * H);
        zur.noalias() = h_prev * weight.topRows(H).leftCols(2 * H);
        zur.noalias() += x * weight.bottomRows(F).leftCols(2 * H);
        zur.rowwise() += bias.leftCols(2 * H);
        k.x = x;
        k.h_prev = h_prev;
        k.u = sigmoid_array(zur.leftCols(H).array()).matrix();
        k.r = sigmoid_array(zur.rightCols(H).array()).matrix();
        k.rh = k.r.cwiseProduct(h_prev);
        Mat<S> zg(x.rows(), H);
        zg.noalias() = k.rh * weight.topRows(H).rightCols(H);
        zg.noalias() += x * weight.bottomRows(F).rightCols(H);
        zg.rowwise() += bias.rightCols(H);
        k.g = zg.array().tanh().matrix();
        h = k.u.cwiseProduct(h_prev) + (S(1) - k.u.array()).matrix().cwiseProduct(k.g);
    }

    template <typename S>
    void gru_step_backward(const GruStepCache<S> &k, const Mat<S> &dh, const Mat<S> &weight, Mat<S> &dweight,
                           RowVec<S> &dbias, Mat<S> &dx, Mat<S> &dh_prev)
    {
        const Eigen::Index H = k.h_prev.cols();
        const Eigen::Index F = weight.rows() - H;
        const Mat<S> dg = dh.cwiseProduct((S(1) - k.u.array()).matrix());
        const Mat<S> du = dh.cwiseProduct(k.h_prev - k.g);
        const Mat<S> dzg = dg.cwiseProduct((S(1) - k.g.array().square()).matrix());
        const Mat<S> drh = dzg * weight.topRows(H).rightCols(H).transpose();
        const Mat<S> dr = drh.cwiseProduct(k.h_prev);

        Mat<S> dzur(dh.rows(), 2 * H);
        dzur.leftCols(H) = du.cwiseProduct((k.u.array() * (S(1) - k.u.array())).matrix());
        dzur.rightCols(H) = dr.cwiseProduct((k.r.array() * (S(1) - k.r.array())).matrix());

        dweight.topRows(H).leftCols(2 * H).noalias() += k.h_prev.transpose() * dzur;
        dweight.bottomRows(F).leftCols(2 * H).noalias() += k.x.transpose() * dzur;
        dweight.topRows(H).rightCols(H).noalias() += k.rh.transpose() * dzg;
        dweight.bottomRows(F).rightCols(H).noalias() += k.x.transpose() * dzg;
        dbias.leftCols(2 * H) += dzur.colwise().sum();
        dbias.rightCols(H) += dzg.colwise().sum();

        dh_prev = dh.cwiseProduct(k.u) + drh.cwiseProduct(k.r);
        dh_prev.noalias() += dzur * weight.topRows(H).leftCols(2 * H).transpose();
        dx.noalias() = dzur * weight.bottomRows(F).leftCols(2 * H).transpose();
        dx.noalias() += dzg * weight.bottomRows(F).rightCols(H).transpose();
    }

    enum class Recurrence
    {
        lstm,
        gru
    };

    inline std::string_view recurrence_name(Recurrence r) { return r == Recurrence::lstm ? "lstm" : "gru"; }

    inline Recurrence parse_recurrence(std::string_view s)
    {
        if (s == "lstm")
            return Recurrence::lstm;
        if (s == "gru")
            return Recurrence::gru;
        throw std::invalid_argument("Unknown recurrence '" + std::string(s) + "'.");
    }

    // Recurrent layer over a B x (T*F) sequence, returning all hidden states as B x (T*H).
    // Zero initial state. Input kernels use fan-in uniform init, recurrent kernels are orthogonal
    // per gate, LSTM forget-gate bias starts at 1.
    template <typename S>
    class RecurrentLayer
    {
      public:
        Parameter<S> weight, bias;

        RecurrentLayer() = default;

        template <typename Rng>
        RecurrentLayer(std::string name, Recurrence kind, Eigen::Index input, Eigen::Index hidden, Rng &rng)
            : kind_(kind), hidden_(hidden)
        {
            const Eigen::Index gates = kind == Recurrence::lstm ? 4 : 3;
            weight.name = name + ".weight";
            bias.name = name + ".bias";
            weight.resize(hidden + input, gates * hidden);
            bias.resize(1, gates * hidden);
            Mat<S> in_kernel(input, gates * hidden);
            init_fan_in_uniform(in_kernel, input, rng);
            weight.value.bottomRows(input) = in_kernel;
            for (Eigen::Index g = 0; g < gates; ++g)
                weight.value.topRows(hidden).middleCols(g * hidden, hidden) = orthogonal<S>(hidden, rng);
            if (kind == Recurrence::lstm)
                bias.value.middleCols(0, hidden).setOnes();
        }

        Recurrence kind() const { return kind_; }
        Eigen::Index hidden() const { return hidden_; }
        Eigen::Index input() const { return weight.value.rows() - hidden_; }

        Mat<S> forward(const Mat<S> &seq, Eigen::Index steps)
        {
            const Eigen::Index B = seq.rows();
            const Eigen::Index F = input();
            const Eigen::Index H = hidden_;
            if (seq.cols() != steps * F)
                throw std::invalid_argument("Recurrent layer input width does not match steps x features.");
            steps_ = steps;
            Mat<S> out(B, steps * H);
            Mat<S> h = Mat<S>::Zero(B, H), c = Mat<S>::Zero(B, H);
            const RowVec<S> b = bias.value.row(0);
            if (kind_ == Recurrence::lstm)
            {
                lstm_cache_.resize(static_cast<std::size_t>(steps));
                for (Eigen::Index t = 0; t < steps; ++t)
                {
                    auto &k = lstm_cache_[static_cast<std::size_t>(t)];
                    lstm_step_forward<S>(seq.middleCols(t * F, F), h, c, weight.value, b, k);
                    h = k.o.cwiseProduct(k.tanh_c);
                    c = k.c;
                    out.middleCols(t * H, H) = h;
                }
            }
            else
            {
                gru_cache_.resize(static_cast<std::size_t>(steps));
                for (Eigen::Index t = 0; t < steps; ++t)
                {
                    Mat<S> hn;
                    gru_step_forward<S>(seq.middleCols(t * F, F), h, weight.value, b,
                                        gru_cache_[static_cast<std::size_t>(t)], hn);
                    h = std::move(hn);
                    out.middleCols(t * H, H) = h;
                }
            }
            return out;
        }

        // Backpropagation through time; dout is B x (T*H).
        Mat<S> backward(const Mat<S> &dout, bool param_grads = true)
        {
            const Eigen::Index B = dout.rows();
            const Eigen::Index F = input();
            const Eigen::Index H = hidden_;
            Mat<S> dseq(B, steps_ * F);
            Mat<S> dh_next = Mat<S>::Zero(B, H), dc_next = Mat<S>::Zero(B, H);
            Mat<S> dweight = Mat<S>::Zero(weight.value.rows(), weight.value.cols());
            RowVec<S> dbias = RowVec<S>::Zero(bias.value.cols());
            Mat<S> dx(B, F), dh_prev(B, H), dc_prev(B, H);
            for (Eigen::Index t = steps_ - 1; t >= 0; --t)
            {
                const Mat<S> dh = dout.middleCols(t * H, H) + dh_next;
                if (kind_ == Recurrence::lstm)
                {
                    lstm_step_backward<S>(lstm_cache_[static_cast<std::size_t>(t)], dh, dc_next, weight.value, dweight,
                                          dbias, dx, dh_prev, dc_prev);
                    dc_next = dc_prev;
                }
                else
                {
                    gru_step_backward<S>(gru_cache_[static_cast<std::size_t>(t)], dh, weight.value, dweight, dbias, dx,
                                         dh_prev);
                }
                dh_next = dh_prev;
                dseq.middleCols(t * F, F) = dx;
            }
            if (param_grads)
            {
                weight.grad += dweight;
                bias.grad += dbias;
            }
            return dseq;
        }

        ParamRefs<S> params() { return {&weight, &bias}; }

      private:
        Recurrence kind_ = Recurrence::lstm;
        Eigen::Index hidden_ = 0;
        Eigen::Index steps_ = 0;
        std::vector<LstmStepCache<S>> lstm_cache_;
        std::vector<GruStepCache<S>> gru_cache_;
    };

    // ---------------------------------------------------------------------------------------
    // Same dense layer applied to every step of a B x (T*F) sequence, followed by tanh.
    template <typename S>
    class TimeDistributedTanh
    {
      public:
        Linear<S> dense;

        TimeDistributedTanh() = default;

        template <typename Rng>
        TimeDistributedTanh(std::string name, Eigen::Index in, Eigen::Index out, Rng &rng) : dense(name, in, out, rng)
        {
        }

        Mat<S> forward(const Mat<S> &seq, Eigen::Index steps)
        {
            const Eigen::Index B = seq.rows();
            const Eigen::Index F = dense.in_features();
            const Eigen::Index O = dense.out_features();
            steps_ = steps;
            // Stack steps vertically so one GEMM covers the whole sequence.
            stacked_.resize(B * steps, F);
            for (Eigen::Index t = 0; t < steps; ++t)
                stacked_.middleRows(t * B, B) = seq.middleCols(t * F, F);
            Mat<S> z(B * steps, O);
            z.noalias() = stacked_ * dense.weight.value;
            z.rowwise() += dense.bias.value.row(0);
            out_stacked_ = z.array().tanh().matrix();
            Mat<S> out(B, steps * O);
            for (Eigen::Index t = 0; t < steps; ++t)
                out.middleCols(t * O, O) = out_stacked_.middleRows(t * B, B);
            return out;
        }

        Mat<S> backward(const Mat<S> &dout, bool param_grads = true)
        {
            const Eigen::Index B = dout.rows();
            const Eigen::Index F = dense.in_features();
            const Eigen::Index O = dense.out_features();
            Mat<S> dz(B * steps_, O);
            for (Eigen::Index t = 0; t < steps_; ++t)
                dz.middleRows(t * B, B) = dout.middleCols(t * O, O);
            dz.array() *= S(1) - out_stacked_.array().square();
            if (param_grads)
            {
                dense.weight.grad.noalias() += stacked_.transpose() * dz;
                dense.bias.grad += dz.colwise().sum();
            }
            const Mat<S> dstacked = dz * dense.weight.value.transpose();
            Mat<S> dseq(B, steps_ * F);
            for (Eigen::Index t = 0; t < steps_; ++t)
                dseq.middleCols(t * F, F) = dstacked.middleRows(t * B, B);
            return dseq;
        }

        ParamRefs<S> params() { return dense.params(); }

      private:
        Eigen::Index steps_ = 0;
        Mat<S> stacked_, out_stacked_;
    };

    // ---------------------------------------------------------------------------------------
    struct AdamConfig
    {
        double learning_rate = 4e-4;
        double beta1 = 0.8;
        double beta2 = 0.999;
        double epsilon = 1e-7;
    };

    template <typename S>
    class Adam
    {
      public:
        Adam() = default;

        Adam(ParamRefs<S> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg)
        {
            for (auto *p : params_)
            {
                m_.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
                v_.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
            }
        }

        void step()
        {
            ++t_;
            const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
            const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
            const S step_size = static_cast<S>(cfg_.learning_rate * std::sqrt(bc2) / bc1);
            const S b1 = static_cast<S>(cfg_.beta1), b2 = static_cast<S>(cfg_.beta2);
            const S eps = static_cast<S>(cfg_.epsilon * std::sqrt(bc2));
            for (std::size_t k = 0; k < params_.size(); ++k)
            {
                auto &g = params_[k]->grad;
                m_[k] = b1 * m_[k] + (S(1) - b1) * g;
                v_[k] = b2 * v_[k] + (S(1) - b2) * g.cwiseAbs2();
                params_[k]->value.array() -= step_size * m_[k].array() / (v_[k].array().sqrt() + eps);
            }
        }

        long long steps() const { return t_; }

      private:
        ParamRefs<S> params_;
        AdamConfig cfg_;
        std::vector<Mat<S>> m_, v_;
        long long t_ = 0;
    };

} // namespace chanforge::nn

#endif // CHANFORGE_NN_HPP
