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

#ifndef CHANFORGE_MODEL_HPP
#define CHANFORGE_MODEL_HPP

#include "chanforge/nn.hpp"

#include <random>
#include <utility>
#include <vector>

namespace chanforge
{
    template <typename S>
    using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

    // ---------------------------------------------------------------------------------------
    // Single LSTM cell. Every gate matrix has shape hidden x (hidden + input) and acts on the
    // concatenated vector [h_prev, x].
    template <typename S>
    struct LstmCellParams
    {
        nn::Mat<S> W_f, W_i, W_C, W_o;
        Vector<S> b_f, b_i, b_C, b_o;

        static LstmCellParams zeros(Eigen::Index input, Eigen::Index hidden)
        {
            LstmCellParams p;
            for (auto *w : {&p.W_f, &p.W_i, &p.W_C, &p.W_o})
                *w = nn::Mat<S>::Zero(hidden, hidden + input);
            for (auto *b : {&p.b_f, &p.b_i, &p.b_C, &p.b_o})
                *b = Vector<S>::Zero(hidden);
            return p;
        }

        Eigen::Index hidden_size() const { return W_f.rows(); }
        Eigen::Index input_size() const { return W_f.cols() - W_f.rows(); }

        void validate() const
        {
            const Eigen::Index H = hidden_size();
            for (const auto *w : {&W_f, &W_i, &W_C, &W_o})
                if (w->rows() != H || w->cols() != W_f.cols() || w->cols() <= H)
                    throw std::invalid_argument("LSTM gate matrices must share shape hidden x (hidden + input).");
            for (const auto *b : {&b_f, &b_i, &b_C, &b_o})
                if (b->size() != H)
                    throw std::invalid_argument("LSTM bias length must equal the hidden size.");
        }

        // Fused (hidden + input) x 4*hidden kernel in [f | i | C~ | o] column order.
        nn::Mat<S> fused_weight() const
        {
            const Eigen::Index H = hidden_size();
            nn::Mat<S> w(W_f.cols(), 4 * H);
            w.middleCols(0, H) = W_f.transpose();
            w.middleCols(H, H) = W_i.transpose();
            w.middleCols(2 * H, H) = W_C.transpose();
            w.middleCols(3 * H, H) = W_o.transpose();
            return w;
        }

        nn::RowVec<S> fused_bias() const
        {
            const Eigen::Index H = hidden_size();
            nn::RowVec<S> b(4 * H);
            b << b_f.transpose(), b_i.transpose(), b_C.transpose(), b_o.transpose();
            return b;
        }
    };

    template <typename S>
    struct LstmState
    {
        Vector<S> h, c;
    };

    namespace detail
    {
        template <typename S>
        void check_cell_shapes(const Vector<S> &x, const Vector<S> &h, Eigen::Index input, Eigen::Index hidden)
        {
            if (x.size() != input || h.size() != hidden)
                throw std::invalid_argument("Cell input/state sizes do not match the parameters.");
        }
    } // namespace detail

    // f = s(W_f[h,x]+b_f), i = s(W_i[h,x]+b_i), C~ = tanh(W_C[h,x]+b_C), C = f*C_prev + i*C~,
    // o = s(W_o[h,x]+b_o), h = o * tanh(C).
    template <typename S>
    LstmState<S> lstm_cell_step(const Vector<S> &x, const Vector<S> &h_prev, const Vector<S> &c_prev,
                                const LstmCellParams<S> &p)
    {
        p.validate();
        detail::check_cell_shapes(x, h_prev, p.input_size(), p.hidden_size());
        if (c_prev.size() != p.hidden_size())
            throw std::invalid_argument("Cell state size does not match the parameters.");
        nn::LstmStepCache<S> k;
        nn::lstm_step_forward<S>(x.transpose(), h_prev.transpose(), c_prev.transpose(), p.fused_weight(),
                                 p.fused_bias(), k);
        return {k.o.cwiseProduct(k.tanh_c).transpose(), k.c.transpose()};
    }

    template <typename S>
    struct LstmCellGrads
    {
        LstmCellParams<S> params; // gradients w.r.t. every weight and bias
        Vector<S> x, h_prev, c_prev;
    };

    // Gradients of a scalar loss through one LSTM step given dL/dh and dL/dc of its outputs.
    template <typename S>
    LstmCellGrads<S> lstm_cell_backward(const Vector<S> &x, const Vector<S> &h_prev, const Vector<S> &c_prev,
                                        const LstmCellParams<S> &p, const Vector<S> &dh, const Vector<S> &dc)
    {
        p.validate();
        const Eigen::Index H = p.hidden_size();
        const nn::Mat<S> w = p.fused_weight();
        nn::LstmStepCache<S> k;
        nn::lstm_step_forward<S>(x.transpose(), h_prev.transpose(), c_prev.transpose(), w, p.fused_bias(), k);
        nn::Mat<S> dw = nn::Mat<S>::Zero(w.rows(), w.cols());
        nn::RowVec<S> db = nn::RowVec<S>::Zero(4 * H);
        nn::Mat<S> dx(1, p.input_size()), dhp(1, H), dcp(1, H);
        nn::lstm_step_backward<S>(k, dh.transpose(), dc.transpose(), w, dw, db, dx, dhp, dcp);

        LstmCellGrads<S> g;
        g.params.W_f = dw.middleCols(0, H).transpose();
        g.params.W_i = dw.middleCols(H, H).transpose();
        g.params.W_C = dw.middleCols(2 * H, H).transpose();
        g.params.W_o = dw.middleCols(3 * H, H).transpose();
        g.params.b_f = db.middleCols(0, H).transpose();
        g.params.b_i = db.middleCols(H, H).transpose();
        g.params.b_C = db.middleCols(2 * H, H).transpose();
        g.params.b_o = db.middleCols(3 * H, H).transpose();
        g.x = dx.transpose();
        g.h_prev = dhp.transpose();
        g.c_prev = dcp.transpose();
        return g;
    }

    // ---------------------------------------------------------------------------------------
    // Single GRU cell: u = s(W_u[h,x]+b_u), r = s(W_r[h,x]+b_r), h~ = tanh(W_h[r*h,x]+b_h),
    // h_t = u * h_prev + (1 - u) * h~.
    template <typename S>
    struct GruCellParams
    {
        nn::Mat<S> W_u, W_r, W_h;
        Vector<S> b_u, b_r, b_h;

        static GruCellParams zeros(Eigen::Index input, Eigen::Index hidden)
        {
            GruCellParams p;
            for (auto *w : {&p.W_u, &p.W_r, &p.W_h})
                *w = nn::Mat<S>::Zero(hidden, hidden + input);
            for (auto *b : {&p.b_u, &p.b_r, &p.b_h})
                *b = Vector<S>::Zero(hidden);
            return p;
        }

        Eigen::Index hidden_size() const { return W_u.rows(); }
        Eigen::Index input_size() const { return W_u.cols() - W_u.rows(); }

        void validate() const
        {
            const Eigen::Index H = hidden_size();
            for (const auto *w : {&W_u, &W_r, &W_h})
                if (w->rows() != H || w->cols() != W_u.cols() || w->cols() <= H)
                    throw std::invalid_argument("GRU gate matrices must share shape hidden x (hidden + input).");
            for (const auto *b : {&b_u, &b_r, &b_h})
                if (b->size() != H)
                    throw std::invalid_argument("GRU bias length must equal the hidden size.");
        }

        nn::Mat<S> fused_weight() const
        {
            const Eigen::Index H = hidden_size();
            nn::Mat<S> w(W_u.cols(), 3 * H);
            w.middleCols(0, H) = W_u.transpose();
            w.middleCols(H, H) = W_r.transpose();
            w.middleCols(2 * H, H) = W_h.transpose();
            return w;
        }

        nn::RowVec<S> fused_bias() const
        {
            nn::RowVec<S> b(3 * hidden_size());
            b << b_u.transpose(), b_r.transpose(), b_h.transpose();
            return b;
        }
    };

    template <typename S>
    Vector<S> gru_cell_step(const Vector<S> &x, const Vector<S> &h_prev, const GruCellParams<S> &p)
    {
        p.validate();
        detail::check_cell_shapes(x, h_prev, p.input_size(), p.hidden_size());
        nn::GruStepCache<S> k;
        nn::Mat<S> h;
        nn::gru_step_forward<S>(x.transpose(), h_prev.transpose(), p.fused_weight(), p.fused_bias(), k, h);
        return h.transpose();
    }

    template <typename S>
    struct GruCellGrads
    {
        GruCellParams<S> params;
        Vector<S> x, h_prev;
    };

    template <typename S>
    GruCellGrads<S> gru_cell_backward(const Vector<S> &x, const Vector<S> &h_prev, const GruCellParams<S> &p,
                                      const Vector<S> &dh)
    {
        p.validate();
        const Eigen::Index H = p.hidden_size();
        const nn::Mat<S> w = p.fused_weight();
        nn::GruStepCache<S> k;
        nn::Mat<S> h;
        nn::gru_step_forward<S>(x.transpose(), h_prev.transpose(), w, p.fused_bias(), k, h);
        nn::Mat<S> dw = nn::Mat<S>::Zero(w.rows(), w.cols());
        nn::RowVec<S> db = nn::RowVec<S>::Zero(3 * H);
        nn::Mat<S> dx(1, p.input_size()), dhp(1, H);
        nn::gru_step_backward<S>(k, dh.transpose(), w, dw, db, dx, dhp);

        GruCellGrads<S> g;
        g.params.W_u = dw.middleCols(0, H).transpose();
        g.params.W_r = dw.middleCols(H, H).transpose();
        g.params.W_h = dw.middleCols(2 * H, H).transpose();
        g.params.b_u = db.middleCols(0, H).transpose();
        g.params.b_r = db.middleCols(H, H).transpose();
        g.params.b_h = db.middleCols(2 * H, H).transpose();
        g.x = dx.transpose();
        g.h_prev = dhp.transpose();
        return g;
    }

    // ---------------------------------------------------------------------------------------
    // Conditional generator:
    //   embed(y) * z -> [dense -> batchnorm -> leaky relu] x len(fc_sizes) -> dense(T*D)
    //   -> reshape T x D -> stacked recurrent layers over T (hidden D) -> per-step dense + tanh.
    struct GeneratorConfig
    {
        int n_snapshots = 300;
        int n_delay_bins = 300;
        int latent_dim = 100;
        std::vector<int> fc_sizes = {2048, 1000};
        int n_classes = n_categories;
        int n_recurrent_layers = 2;
        nn::Recurrence recurrence = nn::Recurrence::lstm;
        double leaky_slope = 0.2;
        double bn_momentum = 0.8;

        Eigen::Index output_size() const { return static_cast<Eigen::Index>(n_snapshots) * n_delay_bins; }
    };

    template <typename S>
    class Generator
    {
      public:
        Generator() = default;

        template <typename Rng>
        Generator(GeneratorConfig cfg, Rng &rng) : cfg_(std::move(cfg))
        {
            if (cfg_.latent_dim < 1 || cfg_.n_snapshots < 1 || cfg_.n_delay_bins < 1 || cfg_.n_classes < 1)
                throw std::invalid_argument("Generator dimensions must be positive.");
            embedding_ = nn::Embedding<S>("gen.embedding", cfg_.n_classes, cfg_.latent_dim, rng);
            Eigen::Index in = cfg_.latent_dim;
            for (std::size_t k = 0; k < cfg_.fc_sizes.size(); ++k)
            {
                const std::string n = "gen.fc" + std::to_string(k + 1);
                fc_.emplace_back(n, in, cfg_.fc_sizes[k], rng);
                bn_.emplace_back(n + ".bn", cfg_.fc_sizes[k], cfg_.bn_momentum);
                act_.emplace_back(static_cast<S>(cfg_.leaky_slope));
                in = cfg_.fc_sizes[k];
            }
            to_grid_ = nn::Linear<S>("gen.fc" + std::to_string(cfg_.fc_sizes.size() + 1), in, cfg_.output_size(), rng);
            for (int l = 0; l < cfg_.n_recurrent_layers; ++l)
                rnn_.emplace_back("gen.rnn" + std::to_string(l + 1), cfg_.recurrence, cfg_.n_delay_bins,
                                  cfg_.n_delay_bins, rng);
            head_ = nn::TimeDistributedTanh<S>("gen.out", cfg_.n_delay_bins, cfg_.n_delay_bins, rng);
        }

        const GeneratorConfig &config() const { return cfg_; }

        // z is B x latent_dim; returns B x (T*D), row-major T x D per sample.
        nn::Mat<S> forward(const nn::Mat<S> &z, const std::vector<int> &labels, nn::Mode mode)
        {
            if (z.cols() != cfg_.latent_dim || z.rows() != static_cast<Eigen::Index>(labels.size()))
                throw std::invalid_argument("Latent batch shape does not match the generator.");
            emb_ = embedding_.forward(labels);
            z_ = z;
            nn::Mat<S> a = emb_.cwiseProduct(z);
            for (std::size_t k = 0; k < fc_.size(); ++k)
                a = act_[k].forward(bn_[k].forward(fc_[k].forward(a), mode));
            a = to_grid_.forward(a);
            for (auto &r : rnn_)
                a = r.forward(a, cfg_.n_snapshots);
            return head_.forward(a, cfg_.n_snapshots);
        }

        void backward(const nn::Mat<S> &dout)
        {
            nn::Mat<S> d = head_.backward(dout);
            for (auto it = rnn_.rbegin(); it != rnn_.rend(); ++it)
                d = it->backward(d);
            d = to_grid_.backward(d);
            for (std::size_t k = fc_.size(); k-- > 0;)
                d = fc_[k].backward(bn_[k].backward(act_[k].backward(d)), true, true);
            embedding_.backward(d.cwiseProduct(z_));
        }

        nn::ParamRefs<S> params()
        {
            nn::ParamRefs<S> out = embedding_.params();
            for (std::size_t k = 0; k < fc_.size(); ++k)
            {
                append(out, fc_[k].params());
                append(out, bn_[k].params());
            }
            append(out, to_grid_.params());
            for (auto &r : rnn_)
                append(out, r.params());
            append(out, head_.params());
            return out;
        }

        // Non-trainable state (batch-norm running statistics).
        std::vector<std::pair<std::string, nn::RowVec<S> *>> buffers()
        {
            std::vector<std::pair<std::string, nn::RowVec<S> *>> out;
            for (std::size_t k = 0; k < bn_.size(); ++k)
            {
                const std::string n = "gen.fc" + std::to_string(k + 1) + ".bn";
                out.emplace_back(n + ".running_mean", &bn_[k].running_mean);
                out.emplace_back(n + ".running_var", &bn_[k].running_var);
            }
            return out;
        }

      private:
        static void append(nn::ParamRefs<S> &a, const nn::ParamRefs<S> &b) { a.insert(a.end(), b.begin(), b.end()); }

        GeneratorConfig cfg_;
        nn::Embedding<S> embedding_;
        std::vector<nn::Linear<S>> fc_;
        std::vector<nn::BatchNorm<S>> bn_;
        std::vector<nn::LeakyRelu<S>> act_;
        nn::Linear<S> to_grid_;
        std::vector<nn::RecurrentLayer<S>> rnn_;
        nn::TimeDistributedTanh<S> head_;
        nn::Mat<S> emb_, z_;
    };

    // ---------------------------------------------------------------------------------------
    // Conditional discriminator:
    //   flatten(P) * embed(y) -> [dense -> leaky relu -> dropout] x len(hidden) -> dense(1) -> sigmoid.
    struct DiscriminatorConfig
    {
        int n_snapshots = 300;
        int n_delay_bins = 300;
        std::vector<int> hidden = {2048, 1024, 512};
        int n_classes = n_categories;
        double leaky_slope = 0.2;
        double dropout = 0.4;

        Eigen::Index input_size() const { return static_cast<Eigen::Index>(n_snapshots) * n_delay_bins; }
    };

    template <typename S>
    class Discriminator
    {
      public:
        Discriminator() = default;

        template <typename Rng>
        Discriminator(DiscriminatorConfig cfg, Rng &rng) : cfg_(std::move(cfg))
        {
            if (cfg_.n_snapshots < 1 || cfg_.n_delay_bins < 1 || cfg_.n_classes < 1)
                throw std::invalid_argument("Discriminator dimensions must be positive.");
            embedding_ = nn::Embedding<S>("disc.embedding", cfg_.n_classes, cfg_.input_size(), rng);
            Eigen::Index in = cfg_.input_size();
            for (std::size_t k = 0; k < cfg_.hidden.size(); ++k)
            {
                fc_.emplace_back("disc.fc" + std::to_string(k + 1), in, cfg_.hidden[k], rng);
                act_.emplace_back(static_cast<S>(cfg_.leaky_slope));
                drop_.emplace_back(cfg_.dropout);
                in = cfg_.hidden[k];
            }
            out_ = nn::Linear<S>("disc.out", in, 1, rng);
        }

        const DiscriminatorConfig &config() const { return cfg_; }

        nn::Linear<S> &output_layer() { return out_; }

        // x is B x (T*D); returns B x 1 probabilities that each sample is real.
        template <typename Rng>
        nn::Mat<S> forward(const nn::Mat<S> &x, const std::vector<int> &labels, nn::Mode mode, Rng &rng)
        {
            if (x.cols() != cfg_.input_size() || x.rows() != static_cast<Eigen::Index>(labels.size()))
                throw std::invalid_argument("Discriminator input shape does not match its configuration.");
            emb_ = embedding_.forward(labels);
            x_ = x;
            nn::Mat<S> a = x.cwiseProduct(emb_);
            for (std::size_t k = 0; k < fc_.size(); ++k)
                a = drop_[k].forward(act_[k].forward(fc_[k].forward(a)), mode, rng);
            logit_ = out_.forward(a);
            prob_ = nn::sigmoid_array(logit_.array()).matrix();
            return prob_;
        }

        nn::Mat<S> forward(const nn::Mat<S> &x, const std::vector<int> &labels)
        {
            std::mt19937_64 unused(0);
            return forward(x, labels, nn::Mode::eval, unused);
        }

        // Pre-sigmoid outputs of the last forward pass.
        const nn::Mat<S> &logits() const { return logit_; }

        // dprob is dL/dprob (B x 1). Returns dL/dx when `need_input_grad`.
        nn::Mat<S> backward(const nn::Mat<S> &dprob, bool param_grads = true, bool need_input_grad = false)
        {
            return backward_logits(dprob.cwiseProduct((prob_.array() * (S(1) - prob_.array())).matrix()), param_grads,
                                   need_input_grad);
        }

        // Same as backward() with dL/dlogit supplied directly.
        nn::Mat<S> backward_logits(const nn::Mat<S> &dlogit, bool param_grads = true, bool need_input_grad = false)
        {
            nn::Mat<S> d = out_.backward(dlogit, param_grads, true);
            for (std::size_t k = fc_.size(); k-- > 0;)
            {
                const bool first = k == 0;
                d = fc_[k].backward(act_[k].backward(drop_[k].backward(d)), param_grads,
                                    !first || need_input_grad || param_grads);
            }
            if (!need_input_grad && !param_grads)
                return {};
            if (param_grads)
                embedding_.backward(d.cwiseProduct(x_));
            return need_input_grad ? nn::Mat<S>(d.cwiseProduct(emb_)) : nn::Mat<S>();
        }

        nn::ParamRefs<S> params()
        {
            nn::ParamRefs<S> out = embedding_.params();
            for (auto &f : fc_)
            {
                auto p = f.params();
                out.insert(out.end(), p.begin(), p.end());
            }
            auto p = out_.params();
            out.insert(out.end(), p.begin(), p.end());
            return out;
        }

      private:
        DiscriminatorConfig cfg_;
        nn::Embedding<S> embedding_;
        std::vector<nn::Linear<S>> fc_;
        std::vector<nn::LeakyRelu<S>> act_;
        std::vector<nn::Dropout<S>> drop_;
        nn::Linear<S> out_;
        nn::Mat<S> emb_, x_, logit_, prob_;
    };

} // namespace chanforge

#endif // CHANFORGE_MODEL_HPP
