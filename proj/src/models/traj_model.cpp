#include "hvae/models/traj_model.hpp"

#include <cmath>
#include <stdexcept>

namespace hvae {

Trajectory derivative_sequence(const Trajectory& traj) {
    if (traj.size() < 3) throw std::invalid_argument("derivative needs at least three samples");
    const std::size_t n = traj.size(), c = traj.channels();
    const double inv_t = 1.0 / traj.sample_period();
    std::vector<double> d((n - 1) * c);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = 0; k < c; ++k) d[i * c + k] = (traj.at(i + 1, k) - traj.at(i, k)) * inv_t;
    return Trajectory(traj.schema(), std::move(d));
}

TrajModel::TrajModel(TrajModelConfig config, ChannelSchema schema, NormalizationStats stats, double sample_period,
                     std::uint64_t seed)
    : config_(config), schema_(std::move(schema)), stats_(std::move(stats)), sample_period_(sample_period) {
    if (config_.hidden == 0 || config_.latent == 0 || config_.readout == 0 || config_.layers == 0)
        throw std::invalid_argument("trajectory model sizes must be positive");
    if (config_.samples < 3) throw std::invalid_argument("trajectory model needs at least three samples");
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_))
        throw std::invalid_argument("sample period must be positive");
    stats_.validate();
    if (stats_.size() != schema_.size()) throw std::invalid_argument("stats do not cover the schema");
    pos_idx_ = schema_.indices_with_role(ChannelRole::Position);
    if (pos_idx_.empty()) throw std::invalid_argument("schema has no position channels");
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        const auto role = schema_[c].role;
        if (role == ChannelRole::Position || (config_.condition_force && role == ChannelRole::Force))
            cond_idx_.push_back(c);
    }
    origin_.resize(schema_.size());
    for (std::size_t c = 0; c < schema_.size(); ++c) origin_[c] = stats_.normalize(c, 0.0);
    build();
    nn::Rng rng(seed);
    auto p = params_.values();
    for (const auto& l : encoder) l.init(p, rng);
    head.init(p, rng);
    for (const auto& l : decoder) l.init(p, rng);
    readout.init(p, rng);
    output.init(p, rng);
}

std::size_t TrajModel::decoder_input_width() const {
    return config_.latent + cond_idx_.size() + (config_.phase_input ? 1 : 0);
}

void TrajModel::build() {
    const std::size_t C = schema_.size(), H = config_.hidden;
    encoder.clear();
    decoder.clear();
    for (std::size_t l = 0; l < config_.layers; ++l)
        encoder.push_back(nn::LstmLayer::create(params_, "encoder.lstm" + std::to_string(l),
                                                l == 0 ? C + cond_idx_.size() : H, H));
    head = nn::GaussianHead::create(params_, "encoder.head", H, config_.latent);
    for (std::size_t l = 0; l < config_.layers; ++l)
        decoder.push_back(nn::LstmLayer::create(params_, "decoder.lstm" + std::to_string(l),
                                                l == 0 ? decoder_input_width() : H, H));
    readout = nn::DenseLayer::create(params_, "decoder.readout", H, config_.readout, nn::Activation::Tanh);
    output = nn::DenseLayer::create(params_, "decoder.output", config_.readout, C, nn::Activation::Identity);
}

TrajModel TrajModel::create(TrajModelConfig config, const std::vector<Trajectory>& offset_strokes,
                            std::uint64_t seed) {
    if (offset_strokes.empty()) throw std::invalid_argument("trajectory dataset is empty");
    const ChannelSchema& schema = offset_strokes.front().schema();
    double period = 0.0;
    for (const auto& t : offset_strokes) {
        if (!t.schema().same_channels(schema)) throw std::invalid_argument("trajectory schemas differ");
        period += t.sample_period();
    }
    period /= static_cast<double>(offset_strokes.size());
    auto stats = fit_stats(offset_strokes);
    TrajModel model(config, schema.with_sample_period(period), std::move(stats), period, seed);
    for (const auto& t : offset_strokes) model.check_stroke(t);
    return model;
}

void TrajModel::check_stroke(const Trajectory& t) const {
    if (!t.schema().same_channels(schema_)) throw std::invalid_argument("stroke schema does not match model");
    if (t.size() != config_.samples)
        throw std::invalid_argument("stroke has " + std::to_string(t.size()) + " samples, model expects " +
                                    std::to_string(config_.samples));
    for (std::size_t c : pos_idx_)
        if (t.at(0, c) != 0.0) throw std::invalid_argument("stroke does not start at the origin");
}

void TrajModel::condition_vector(std::span<const double> final_sample, std::span<double> out) const {
    for (std::size_t i = 0; i < cond_idx_.size(); ++i) out[i] = stats_.normalize(cond_idx_[i], final_sample[cond_idx_[i]]);
}

TrajBatch TrajModel::make_batch(std::span<const Trajectory> offset_strokes) const {
    TrajBatch batch;
    batch.samples = config_.samples;
    batch.width = schema_.size();
    batch.cond_width = cond_idx_.size();
    batch.data.reserve(offset_strokes.size() * batch.samples * batch.width);
    std::vector<double> row(batch.width), cond(batch.cond_width);
    for (const auto& t : offset_strokes) {
        check_stroke(t);
        for (std::size_t n = 0; n < t.size(); ++n) {
            stats_.normalize_row(t.row(n), row);
            batch.data.insert(batch.data.end(), row.begin(), row.end());
        }
        condition_vector(t.row(t.size() - 1), cond);
        batch.cond.insert(batch.cond.end(), cond.begin(), cond.end());
    }
    return batch;
}

Posterior TrajModel::encode_normalized(std::span<const double> params, std::span<const double> rows,
                                       std::span<const double> cond,
                                       std::vector<nn::LstmLayer::Sequence>& caches) const {
    const std::size_t N = config_.samples, C = schema_.size(), K = cond.size(), H = config_.hidden;
    std::vector<double> inputs(N * (C + K));
    for (std::size_t n = 0; n < N; ++n) {
        std::copy_n(rows.begin() + static_cast<std::ptrdiff_t>(n * C), C, inputs.begin() + static_cast<std::ptrdiff_t>(n * (C + K)));
        std::copy(cond.begin(), cond.end(), inputs.begin() + static_cast<std::ptrdiff_t>(n * (C + K) + C));
    }
    caches.resize(encoder.size());
    for (std::size_t l = 0; l < encoder.size(); ++l) {
        if (l == 0)
            encoder[l].forward(params, inputs, {}, {}, caches[l]);
        else
            encoder[l].forward(params, caches[l - 1].outputs(H), {}, {}, caches[l]);
    }
    auto h_last = caches.back().output(N - 1, H);
    Posterior post{std::vector<double>(config_.latent), std::vector<double>(config_.latent)};
    head.mu.forward(params, h_last, post.mu);
    head.log_var.forward(params, h_last, post.log_var);
    return post;
}

void TrajModel::decode_normalized(std::span<const double> params, std::span<const double> z,
                                  std::span<const double> cond, std::vector<nn::LstmLayer::Sequence>& caches,
                                  std::vector<double>& readouts, std::vector<double>& out) const {
    const std::size_t N = config_.samples, C = schema_.size(), H = config_.hidden, R = config_.readout;
    const std::size_t D = decoder_input_width();
    std::vector<double> inputs(N * D);
    for (std::size_t n = 0; n < N; ++n) {
        double* row = inputs.data() + n * D;
        std::copy(z.begin(), z.end(), row);
        std::copy(cond.begin(), cond.end(), row + z.size());
        if (config_.phase_input) row[D - 1] = static_cast<double>(n) / static_cast<double>(N - 1);
    }
    caches.resize(decoder.size());
    for (std::size_t l = 0; l < decoder.size(); ++l) {
        if (l == 0)
            decoder[l].forward(params, inputs, {}, {}, caches[l]);
        else
            decoder[l].forward(params, caches[l - 1].outputs(H), {}, {}, caches[l]);
    }
    readouts.assign(N * R, 0.0);
    out.assign(N * C, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        std::span<double> r(readouts.data() + n * R, R), y(out.data() + n * C, C);
        readout.forward(params, caches.back().output(n, H), r);
        output.forward(params, r, y);
    }
    for (std::size_t c : pos_idx_) out[c] = origin_[c];
}

Posterior TrajModel::encode(const Trajectory& offset_stroke) const {
    check_stroke(offset_stroke);
    auto batch = make_batch(std::span<const Trajectory>(&offset_stroke, 1));
    std::vector<nn::LstmLayer::Sequence> caches;
    return encode_normalized(params_.values(), batch.data, batch.cond, caches);
}

DecodedStroke TrajModel::decode(std::span<const double> z, const Sample& endpoint) const {
    if (z.size() != config_.latent)
        throw std::invalid_argument("latent has dimension " + std::to_string(z.size()) + ", model expects " +
                                    std::to_string(config_.latent));
    const std::size_t N = config_.samples, C = schema_.size();
    if (endpoint.size() != C) throw std::invalid_argument("endpoint does not match model schema");
    for (std::size_t c = 0; c < C; ++c)
        if (!std::isfinite(endpoint[c])) throw std::invalid_argument("endpoint is not finite");
    std::vector<double> cond(cond_idx_.size());
    condition_vector(endpoint.values(), cond);
    std::vector<nn::LstmLayer::Sequence> caches;
    std::vector<double> readouts, out;
    decode_normalized(params_.values(), z, cond, caches, readouts, out);

    std::vector<double> data(N * C);
    for (std::size_t n = 0; n < N; ++n)
        stats_.denormalize_row(std::span<const double>(out.data() + n * C, C), std::span<double>(data.data() + n * C, C));
    for (std::size_t c : pos_idx_) data[c] = 0.0;

    double err = 0.0;
    for (std::size_t c : pos_idx_) {
        const double d = data[(N - 1) * C + c] - endpoint[c];
        err += d * d;
    }
    return {Trajectory(schema_.with_sample_period(sample_period_), std::move(data)), std::sqrt(err)};
}

LossTerms TrajModel::loss(std::span<const double> params, const TrajBatch& batch, std::span<const double> noise,
                          std::span<double> grad) const {
    const std::size_t B = batch.size();
    if (B == 0) throw std::invalid_argument("trajectory batch is empty");
    const std::size_t N = config_.samples, C = schema_.size(), K = cond_idx_.size();
    const std::size_t J = config_.latent, H = config_.hidden, R = config_.readout, D = decoder_input_width();
    if (batch.samples != N || batch.width != C || batch.cond_width != K)
        throw std::invalid_argument("trajectory batch shape does not match model");
    if (noise.size() != B * J) throw std::invalid_argument("noise must be items x latent");
    const bool backward = !grad.empty();
    const double inv_b = 1.0 / static_cast<double>(B);
    const double s = static_cast<double>(N - 1);  // forward difference over normalized time

    LossTerms terms;
    std::vector<nn::LstmLayer::Sequence> enc, dec;
    std::vector<double> readouts, y, dd((N - 1) * C), dy(N * C), dr(R);
    for (std::size_t b = 0; b < B; ++b) {
        std::span<const double> x(batch.data.data() + b * N * C, N * C);
        std::span<const double> cond(batch.cond.data() + b * K, K);
        auto eps = noise.subspan(b * J, J);
        Posterior post = encode_normalized(params, x, cond, enc);
        auto z = nn::reparameterize(post.mu, post.log_var, eps);
        decode_normalized(params, z, cond, dec, readouts, y);

        double recon = 0.0, deriv = 0.0;
        for (std::size_t i = 0; i < N * C; ++i) {
            const double d = y[i] - x[i];
            recon += d * d;
        }
        for (std::size_t n = 0; n + 1 < N; ++n)
            for (std::size_t c = 0; c < C; ++c) {
                const std::size_t i = n * C + c, j = i + C;
                const double d = s * ((y[j] - y[i]) - (x[j] - x[i]));
                dd[i] = d;
                deriv += d * d;
            }
        recon /= static_cast<double>(N);
        deriv /= static_cast<double>(N - 1);
        const double kl = nn::kl_divergence(post.mu, post.log_var);
        terms.reconstruction += inv_b * recon;
        terms.derivative += inv_b * deriv;
        terms.kl += inv_b * kl;
        if (!backward) continue;

        for (std::size_t i = 0; i < N * C; ++i) dy[i] = inv_b * 2.0 * (y[i] - x[i]) / static_cast<double>(N);
        const double gscale = inv_b * 2.0 * s / static_cast<double>(N - 1);
        for (std::size_t i = 0; i < (N - 1) * C; ++i) {
            dy[i + C] += gscale * dd[i];
            dy[i] -= gscale * dd[i];
        }
        for (std::size_t c : pos_idx_) dy[c] = 0.0;

        std::vector<double> dh(N * H, 0.0);
        for (std::size_t n = 0; n < N; ++n) {
            std::fill(dr.begin(), dr.end(), 0.0);
            std::span<const double> rn(readouts.data() + n * R, R), yn(y.data() + n * C, C);
            output.backward(params, grad, rn, yn, std::span<const double>(dy.data() + n * C, C), dr);
            readout.backward(params, grad, dec.back().output(n, H), rn, dr, std::span<double>(dh.data() + n * H, H));
        }
        for (std::size_t l = decoder.size(); l-- > 0;) {
            const std::size_t in_w = l == 0 ? D : H;
            std::vector<double> d_in(N * in_w, 0.0);
            decoder[l].backward(params, grad, dec[l], dh, d_in, {}, {});
            if (l == 0) {
                std::vector<double> dz(J, 0.0);
                for (std::size_t n = 0; n < N; ++n)
                    for (std::size_t j = 0; j < J; ++j) dz[j] += d_in[n * D + j];
                std::vector<double> dmu(J, 0.0), dlv(J, 0.0);
                nn::reparameterize_backward(post.log_var, eps, dz, dmu, dlv);
                nn::kl_gradient(post.mu, post.log_var, inv_b, dmu, dlv);
                auto h_last = enc.back().output(N - 1, H);
                std::vector<double> dh_enc(N * H, 0.0);
                std::span<double> dh_last(dh_enc.data() + (N - 1) * H, H);
                head.mu.backward(params, grad, h_last, post.mu, dmu, dh_last);
                head.log_var.backward(params, grad, h_last, post.log_var, dlv, dh_last);
                for (std::size_t e = encoder.size(); e-- > 0;) {
                    std::vector<double> d_enc_in;
                    if (e > 0) d_enc_in.assign(N * H, 0.0);
                    encoder[e].backward(params, grad, enc[e], dh_enc, d_enc_in, {}, {});
                    dh_enc = std::move(d_enc_in);
                }
            } else {
                dh = std::move(d_in);
            }
        }
    }
    terms.total = terms.reconstruction + terms.derivative + terms.kl;
    return terms;
}

LossTerms TrajModel::loss(const TrajBatch& batch, nn::Rng& rng, std::span<double> grad) const {
    auto noise = rng.normal_vector(batch.size() * config_.latent);
    return loss(params_.values(), batch, noise, grad);
}

TrainHistory train_traj(TrajModel& model, const std::vector<Trajectory>& offset_strokes, const TrainOptions& options) {
    if (options.epochs == 0) return {};
    const TrajBatch all = model.make_batch(offset_strokes);
    const std::size_t item = all.samples * all.width;
    auto batch_loss = [&](std::span<const std::size_t> items, std::span<const double> noise, std::span<double> grad) {
        TrajBatch sub;
        sub.samples = all.samples;
        sub.width = all.width;
        sub.cond_width = all.cond_width;
        for (std::size_t idx : items) {
            auto begin = all.data.begin() + static_cast<std::ptrdiff_t>(idx * item);
            sub.data.insert(sub.data.end(), begin, begin + static_cast<std::ptrdiff_t>(item));
            auto cbegin = all.cond.begin() + static_cast<std::ptrdiff_t>(idx * all.cond_width);
            sub.cond.insert(sub.cond.end(), cbegin, cbegin + static_cast<std::ptrdiff_t>(all.cond_width));
        }
        return model.loss(model.parameters().values(), sub, noise, grad);
    };
    return run_training(model.parameters(), offset_strokes.size(), model.config().latent, options, batch_loss);
}

}  // namespace hvae
