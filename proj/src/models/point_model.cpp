#include "hvae/models/point_model.hpp"

#include <cmath>
#include <stdexcept>

namespace hvae {

namespace {

std::vector<std::string> pair_channel_names(const ChannelSchema& schema) {
    std::vector<std::string> names;
    for (const auto& ch : schema.channels()) names.push_back("start_" + ch.name);
    for (const auto& ch : schema.channels()) names.push_back("end_" + ch.name);
    return names;
}

}  // namespace

PointModel::PointModel(PointModelConfig config, ChannelSchema schema, NormalizationStats stats, std::uint64_t seed)
    : config_(config), schema_(std::move(schema)), stats_(std::move(stats)) {
    if (config_.hidden == 0 || config_.latent == 0 || config_.readout == 0 || config_.max_strokes == 0)
        throw std::invalid_argument("point model sizes must be positive");
    stats_.validate();
    if (stats_.size() != pair_width()) throw std::invalid_argument("point model stats must cover the pair vector");
    build();
    nn::Rng rng(seed);
    auto p = params_.values();
    encoder.init(p, rng);
    head.init(p, rng);
    decoder_init.init(p, rng);
    decoder.init(p, rng);
    readout.init(p, rng);
    output.init(p, rng);
}

void PointModel::build() {
    const std::size_t w = pair_width();
    encoder = nn::LstmLayer::create(params_, "encoder.lstm", w, config_.hidden);
    head = nn::GaussianHead::create(params_, "encoder.head", config_.hidden, config_.latent);
    decoder_init = nn::DenseLayer::create(params_, "decoder.init", config_.latent, config_.hidden, nn::Activation::Tanh);
    decoder = nn::LstmLayer::create(params_, "decoder.lstm", config_.latent, config_.hidden);
    readout = nn::DenseLayer::create(params_, "decoder.readout", config_.hidden, config_.readout, nn::Activation::Tanh);
    output = nn::DenseLayer::create(params_, "decoder.output", config_.readout, w, nn::Activation::Identity);
}

PointModel PointModel::create(PointModelConfig config, const ChannelSchema& schema,
                              const std::vector<EndpointSequence>& dataset, std::uint64_t seed) {
    if (dataset.empty() || dataset.front().empty()) throw std::invalid_argument("point dataset is empty");
    const std::size_t c = schema.size();
    std::vector<std::vector<double>> rows;
    for (const auto& seq : dataset)
        for (const auto& e : seq) {
            if (e.start.size() != c || e.end.size() != c)
                throw std::invalid_argument("endpoint width differs across the dataset");
            std::vector<double> r(e.start.values().begin(), e.start.values().end());
            r.insert(r.end(), e.end.values().begin(), e.end.values().end());
            rows.push_back(std::move(r));
        }
    auto stats = fit_stats_rows(rows, pair_channel_names(schema));
    return PointModel(config, schema, std::move(stats), seed);
}

std::vector<double> PointModel::pair_vector(const StrokeEndpoints& e) const {
    const std::size_t c = schema_.size();
    if (e.start.size() != c || e.end.size() != c) throw std::invalid_argument("endpoint sample does not match schema");
    std::vector<double> v(2 * c);
    for (std::size_t i = 0; i < c; ++i) {
        v[i] = stats_.normalize(i, e.start[i]);
        v[c + i] = stats_.normalize(c + i, e.end[i]);
    }
    return v;
}

void PointModel::check_sequence(const EndpointSequence& seq) const {
    if (seq.empty()) throw std::invalid_argument("endpoint sequence is empty");
    if (seq.size() > config_.max_strokes)
        throw std::invalid_argument("sequence has " + std::to_string(seq.size()) + " strokes, model allows " +
                                    std::to_string(config_.max_strokes));
}

Posterior PointModel::encode_normalized(std::span<const double> params, std::span<const double> rows,
                                        nn::LstmLayer::Sequence* cache) const {
    nn::LstmLayer::Sequence local;
    nn::LstmLayer::Sequence& seq = cache ? *cache : local;
    encoder.forward(params, rows, {}, {}, seq);
    auto h_last = seq.output(seq.steps - 1, config_.hidden);
    Posterior post{std::vector<double>(config_.latent), std::vector<double>(config_.latent)};
    head.mu.forward(params, h_last, post.mu);
    head.log_var.forward(params, h_last, post.log_var);
    return post;
}

Posterior PointModel::encode(const EndpointSequence& seq) const {
    check_sequence(seq);
    std::vector<double> rows;
    for (const auto& e : seq) {
        auto v = pair_vector(e);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    return encode_normalized(params_.values(), rows, nullptr);
}

EndpointSequence PointModel::decode(std::span<const double> z, std::size_t m_count) const {
    if (z.size() != config_.latent)
        throw std::invalid_argument("latent has dimension " + std::to_string(z.size()) + ", model expects " +
                                    std::to_string(config_.latent));
    if (m_count == 0 || m_count > config_.max_strokes) throw std::invalid_argument("stroke count out of range");
    auto p = params_.values();
    std::vector<double> h0(config_.hidden);
    decoder_init.forward(p, z, h0);
    std::vector<double> inputs;
    for (std::size_t t = 0; t < m_count; ++t) inputs.insert(inputs.end(), z.begin(), z.end());
    nn::LstmLayer::Sequence seq;
    decoder.forward(p, inputs, h0, {}, seq);

    const std::size_t c = schema_.size();
    std::vector<double> r(config_.readout), y(pair_width());
    EndpointSequence out;
    for (std::size_t t = 0; t < m_count; ++t) {
        readout.forward(p, seq.output(t, config_.hidden), r);
        output.forward(p, r, y);
        std::vector<double> start(c), end(c);
        for (std::size_t i = 0; i < c; ++i) {
            start[i] = stats_.denormalize(i, y[i]);
            end[i] = stats_.denormalize(c + i, y[c + i]);
        }
        out.push_back({Sample(std::move(start)), Sample(std::move(end)), static_cast<int>(t + 1)});
    }
    return out;
}

PointBatch PointModel::make_batch(std::span<const EndpointSequence> seqs, std::size_t max_len) const {
    PointBatch batch;
    batch.width = pair_width();
    batch.max_len = max_len;
    for (const auto& s : seqs) {
        check_sequence(s);
        batch.max_len = std::max(batch.max_len, s.size());
    }
    batch.data.assign(seqs.size() * batch.max_len * batch.width, 0.0);
    for (std::size_t b = 0; b < seqs.size(); ++b) {
        batch.lengths.push_back(seqs[b].size());
        for (std::size_t m = 0; m < seqs[b].size(); ++m) {
            auto v = pair_vector(seqs[b][m]);
            std::copy(v.begin(), v.end(), batch.data.begin() + static_cast<std::ptrdiff_t>((b * batch.max_len + m) * batch.width));
        }
    }
    return batch;
}

LossTerms PointModel::loss(std::span<const double> params, const PointBatch& batch, std::span<const double> noise,
                           std::span<double> grad) const {
    if (batch.size() == 0) throw std::invalid_argument("point batch is empty");
    if (batch.width != pair_width()) throw std::invalid_argument("point batch width does not match model");
    const std::size_t J = config_.latent, H = config_.hidden, R = config_.readout, W = pair_width();
    if (noise.size() != batch.size() * J) throw std::invalid_argument("noise must be items x latent");
    const bool backward = !grad.empty();
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    LossTerms terms;
    nn::LstmLayer::Sequence enc_seq, dec_seq;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const std::size_t m = batch.lengths[b];
        auto rows = batch.item(b);
        auto eps = noise.subspan(b * J, J);
        Posterior post = encode_normalized(params, rows, &enc_seq);
        auto z = nn::reparameterize(post.mu, post.log_var, eps);

        std::vector<double> h0(H);
        decoder_init.forward(params, z, h0);
        std::vector<double> inputs;
        inputs.reserve(m * J);
        for (std::size_t t = 0; t < m; ++t) inputs.insert(inputs.end(), z.begin(), z.end());
        decoder.forward(params, inputs, h0, {}, dec_seq);

        std::vector<double> r(m * R), y(m * W);
        double recon = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            std::span<double> rt(r.data() + t * R, R), yt(y.data() + t * W, W);
            readout.forward(params, dec_seq.output(t, H), rt);
            output.forward(params, rt, yt);
            for (std::size_t i = 0; i < W; ++i) {
                const double d = yt[i] - rows[t * W + i];
                recon += d * d;
            }
        }
        recon /= static_cast<double>(m);
        const double kl = nn::kl_divergence(post.mu, post.log_var);
        terms.reconstruction += inv_b * recon;
        terms.kl += inv_b * kl;
        if (!backward) continue;

        std::vector<double> dh(m * H, 0.0), dr(R), dy(W);
        for (std::size_t t = 0; t < m; ++t) {
            for (std::size_t i = 0; i < W; ++i)
                dy[i] = inv_b * 2.0 * (y[t * W + i] - rows[t * W + i]) / static_cast<double>(m);
            std::fill(dr.begin(), dr.end(), 0.0);
            std::span<const double> rt(r.data() + t * R, R), yt(y.data() + t * W, W);
            output.backward(params, grad, rt, yt, dy, dr);
            readout.backward(params, grad, dec_seq.output(t, H), rt, dr, std::span<double>(dh.data() + t * H, H));
        }
        std::vector<double> d_inputs(m * J, 0.0), dh0(H, 0.0), dz(J, 0.0);
        decoder.backward(params, grad, dec_seq, dh, d_inputs, dh0, {});
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t j = 0; j < J; ++j) dz[j] += d_inputs[t * J + j];
        decoder_init.backward(params, grad, z, h0, dh0, dz);

        std::vector<double> dmu(J, 0.0), dlv(J, 0.0);
        nn::reparameterize_backward(post.log_var, eps, dz, dmu, dlv);
        nn::kl_gradient(post.mu, post.log_var, inv_b, dmu, dlv);
        auto h_last = enc_seq.output(m - 1, H);
        std::vector<double> dh_enc(m * H, 0.0);
        std::span<double> dh_last(dh_enc.data() + (m - 1) * H, H);
        head.mu.backward(params, grad, h_last, post.mu, dmu, dh_last);
        head.log_var.backward(params, grad, h_last, post.log_var, dlv, dh_last);
        encoder.backward(params, grad, enc_seq, dh_enc, {}, {}, {});
    }
    terms.total = terms.reconstruction + terms.kl;
    return terms;
}

LossTerms PointModel::loss(const PointBatch& batch, nn::Rng& rng, std::span<double> grad) const {
    auto noise = rng.normal_vector(batch.size() * config_.latent);
    return loss(params_.values(), batch, noise, grad);
}

TrainHistory train_point(PointModel& model, const std::vector<EndpointSequence>& dataset, const TrainOptions& options) {
    if (options.epochs == 0) return {};
    const PointBatch all = model.make_batch(dataset);
    auto batch_loss = [&](std::span<const std::size_t> items, std::span<const double> noise, std::span<double> grad) {
        PointBatch sub;
        sub.width = all.width;
        sub.max_len = all.max_len;
        for (std::size_t idx : items) {
            sub.lengths.push_back(all.lengths[idx]);
            auto begin = all.data.begin() + static_cast<std::ptrdiff_t>(idx * all.max_len * all.width);
            sub.data.insert(sub.data.end(), begin, begin + static_cast<std::ptrdiff_t>(all.max_len * all.width));
        }
        return model.loss(model.parameters().values(), sub, noise, grad);
    };
    return run_training(model.parameters(), dataset.size(), model.config().latent, options, batch_loss);
}

}  // namespace hvae
