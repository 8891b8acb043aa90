#include "fgan/train.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "fgan/metrics.hpp"

namespace fgan {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::gan_baseline ? "gan_baseline" : "factorgan";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "gan_baseline") return ModelKind::gan_baseline;
    if (s == "factorgan") return ModelKind::factorgan;
    throw std::invalid_argument("unknown model kind: " + s);
}

std::string to_string(GeneratorOutput output) {
    switch (output) {
        case GeneratorOutput::sigmoid: return "sigmoid";
        case GeneratorOutput::identity: return "identity";
        case GeneratorOutput::mixture_mask: return "mixture_mask";
    }
    throw std::logic_error("unreachable");
}

GeneratorOutput generator_output_from_string(const std::string& s) {
    if (s == "sigmoid") return GeneratorOutput::sigmoid;
    if (s == "identity") return GeneratorOutput::identity;
    if (s == "mixture_mask") return GeneratorOutput::mixture_mask;
    throw std::invalid_argument("unknown generator output: " + s);
}

GeneratorModel make_generator(const GeneratorSpec& spec, double lr, std::uint64_t seed) {
    if (spec.raw_output_dim < 1 || spec.sample_dim < 1)
        throw std::invalid_argument("make_generator: unset output dims");
    std::vector<int> dims;
    dims.push_back(spec.noise_dim + spec.conditioning_dim);
    for (int h : spec.hidden) dims.push_back(h);
    dims.push_back(spec.raw_output_dim);
    OutputActivation out = spec.output == GeneratorOutput::identity ? OutputActivation::identity
                                                                    : OutputActivation::sigmoid;
    GeneratorModel gen;
    gen.spec = spec;
    gen.net = init_params(dims, seed, HiddenActivation::relu, out);
    gen.adam = AdamState::for_net(gen.net, lr);
    return gen;
}

GenForward generator_forward(const GeneratorModel& gen, int n, Rng& rng,
                             const Eigen::MatrixXd* conditioning) {
    const GeneratorSpec& spec = gen.spec;
    GenForward fwd;
    fwd.net_input.resize(n, spec.noise_dim + spec.conditioning_dim);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < spec.noise_dim; ++c) fwd.net_input(r, c) = rng.normal();
    if (spec.conditioning_dim > 0) {
        if (conditioning == nullptr || conditioning->rows() != n ||
            conditioning->cols() != spec.conditioning_dim) {
            throw std::invalid_argument("generator_forward: conditioning rows required");
        }
        fwd.conditioning = *conditioning;
        fwd.net_input.rightCols(spec.conditioning_dim) = fwd.conditioning;
    }
    ForwardResult res = net_forward(gen.net, fwd.net_input, &fwd.cache);
    fwd.raw = res.activated;

    if (spec.output == GeneratorOutput::mixture_mask) {
        fwd.samples.resize(n, spec.sample_dim);
        const int sd = static_cast<int>(spec.mask_a_dims.size());
        for (int r = 0; r < n; ++r) {
            for (int j = 0; j < sd; ++j) {
                double m = fwd.conditioning(r, j);
                double a_raw = fwd.raw(r, j) * m;
                // m - fl(m - a_raw) is exactly representable (0 <= a_raw <= m
                // in magnitude, same sign), so a + v == m holds bitwise.
                double v = m - a_raw;
                double a = m - v;
                fwd.samples(r, spec.mask_a_dims[j]) = a;
                fwd.samples(r, spec.mask_v_dims[j]) = v;
            }
        }
    } else {
        fwd.samples = Eigen::MatrixXd::Zero(n, spec.sample_dim);
        for (std::size_t k = 0; k < spec.output_dims.size(); ++k)
            fwd.samples.col(spec.output_dims[k]) = fwd.raw.col(static_cast<Eigen::Index>(k));
        for (std::size_t k = 0; k < spec.conditioning_sample_dims.size(); ++k)
            fwd.samples.col(spec.conditioning_sample_dims[k]) =
                fwd.conditioning.col(static_cast<Eigen::Index>(k));
    }
    return fwd;
}

Eigen::MatrixXd generator_sample_grad_to_raw(const GeneratorSpec& spec, const GenForward& fwd,
                                             const Eigen::MatrixXd& sample_grad) {
    const Eigen::Index n = sample_grad.rows();
    Eigen::MatrixXd raw_grad(n, spec.raw_output_dim);
    if (spec.output == GeneratorOutput::mixture_mask) {
        const int sd = static_cast<int>(spec.mask_a_dims.size());
        for (Eigen::Index r = 0; r < n; ++r) {
            for (int j = 0; j < sd; ++j) {
                double m = fwd.conditioning(r, j);
                raw_grad(r, j) = m * (sample_grad(r, spec.mask_a_dims[j]) -
                                      sample_grad(r, spec.mask_v_dims[j]));
            }
        }
    } else {
        for (std::size_t k = 0; k < spec.output_dims.size(); ++k)
            raw_grad.col(static_cast<Eigen::Index>(k)) = sample_grad.col(spec.output_dims[k]);
    }
    return raw_grad;
}

LogitHead make_logit_head(std::string name, std::vector<int> input_dims,
                          const std::vector<int>& hidden, double lr, std::uint64_t seed) {
    if (input_dims.empty()) throw std::invalid_argument("make_logit_head: empty input dims");
    std::vector<int> dims;
    dims.push_back(static_cast<int>(input_dims.size()));
    for (int h : hidden) dims.push_back(h);
    dims.push_back(1);
    LogitHead head;
    head.name = std::move(name);
    head.input_dims = std::move(input_dims);
    head.net = init_params(dims, Rng::derive_seed(seed, 0), HiddenActivation::leaky_relu,
                           OutputActivation::identity);
    head.adam = AdamState::for_net(head.net, lr);
    head.sn = SpectralNormState::for_net(head.net, Rng::derive_seed(seed, 1));
    return head;
}

SnView sn_view(const DenseNet& net, SpectralNormState& sn, bool advance) {
    SnView view;
    view.net = net;
    view.norms.reserve(net.weights.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        NormalizedWeight nw =
            spectral_normalize(net.weights[l], sn.u[l], sn.power_iterations_per_step, advance);
        view.net.weights[l] = nw.weight;
        view.norms.push_back(std::move(nw));
    }
    return view;
}

DenseNet frozen_norm_net(const LogitHead& head) {
    DenseNet net = head.net;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Eigen::VectorXd u = head.sn.u[l];  // copy: do not advance the state
        net.weights[l] =
            spectral_normalize(head.net.weights[l], u, head.sn.power_iterations_per_step, false)
                .weight;
    }
    return net;
}

double head_logit(const LogitHead& head, const Eigen::VectorXd& input) {
    DenseNet net = frozen_norm_net(head);
    return net_forward(net, input.transpose()).activated(0, 0);
}

double update_head(LogitHead& head, const Eigen::MatrixXd& real_rows,
                   const Eigen::MatrixXd& fake_rows) {
    SnView view = sn_view(head.net, head.sn, /*advance=*/true);
    ForwardCache real_cache, fake_cache;
    ForwardResult real_fwd = net_forward(view.net, real_rows, &real_cache);
    ForwardResult fake_fwd = net_forward(view.net, fake_rows, &fake_cache);
    Eigen::VectorXd real_logits = real_fwd.activated.col(0);
    Eigen::VectorXd fake_logits = fake_fwd.activated.col(0);
    double loss = disc_loss(real_logits, fake_logits);
    DiscLossGrads lgrads = disc_loss_grads(real_logits, fake_logits);
    NetGradients greal = net_backward(view.net, real_cache, lgrads.real);
    NetGradients gfake = net_backward(view.net, fake_cache, lgrads.fake);
    for (std::size_t l = 0; l < greal.weight_grads.size(); ++l) {
        Eigen::MatrixXd wbar_grad = greal.weight_grads[l] + gfake.weight_grads[l];
        greal.weight_grads[l] = spectral_norm_weight_grad(wbar_grad, view.norms[l]);
        greal.bias_grads[l] += gfake.bias_grads[l];
    }
    adam_step(head.net, greal, head.adam);
    return loss;
}

std::vector<const LogitHead*> DiscriminatorSet::ordered_heads() const {
    std::vector<const LogitHead*> out;
    if (kind == ModelKind::gan_baseline) {
        for (const auto& h : joint_heads) out.push_back(&h);
        return out;
    }
    for (const auto& h : marginal_heads) out.push_back(&h);
    std::size_t p_idx = 0;
    for (std::size_t j = 0; j < layout.pairs.size(); ++j) {
        if (layout.pairs[j].has_p) out.push_back(&p_heads[p_idx++]);
        out.push_back(&q_heads[j]);
    }
    return out;
}

std::vector<LogitHead*> DiscriminatorSet::ordered_heads() {
    std::vector<LogitHead*> out;
    for (const LogitHead* h : static_cast<const DiscriminatorSet*>(this)->ordered_heads())
        out.push_back(const_cast<LogitHead*>(h));
    return out;
}

std::vector<std::string> DiscriminatorSet::head_names() const {
    std::vector<std::string> names;
    for (const LogitHead* h : ordered_heads()) names.push_back(h->name);
    return names;
}

DiscriminatorSet make_discriminators(ModelKind kind, const HeadLayout& layout,
                                     const std::vector<int>& hidden, double lr,
                                     std::uint64_t seed) {
    DiscriminatorSet set;
    set.kind = kind;
    set.layout = layout;
    std::uint64_t head_index = 0;
    auto next_seed = [&] { return Rng::derive_seed(seed, 1 + head_index++); };

    if (kind == ModelKind::gan_baseline) {
        std::vector<int> all_dims(layout.partition.total_dim);
        for (int i = 0; i < layout.partition.total_dim; ++i) all_dims[i] = i;
        set.joint_heads.push_back(
            make_logit_head("d_joint", std::move(all_dims), hidden, lr, next_seed()));
        return set;
    }

    for (std::size_t i = 0; i < layout.marginals.size(); ++i) {
        set.marginal_heads.push_back(make_logit_head("d_marg_" + std::to_string(i + 1),
                                                     layout.marginals[i].dims, hidden, lr,
                                                     next_seed()));
    }
    const bool single_pair = layout.pairs.size() == 1;
    for (std::size_t j = 0; j < layout.pairs.size(); ++j) {
        std::string suffix = single_pair ? "" : "_" + std::to_string(j + 1);
        if (layout.pairs[j].has_p) {
            set.p_heads.push_back(
                make_logit_head("d_p" + suffix, layout.pairs[j].scope, hidden, lr, next_seed()));
        }
        set.q_heads.push_back(
            make_logit_head("d_q" + suffix, layout.pairs[j].scope, hidden, lr, next_seed()));
    }
    return set;
}

namespace {

std::function<double(const Eigen::VectorXd&)> frozen_head_fn(const LogitHead& head) {
    DenseNet net = frozen_norm_net(head);
    return [net](const Eigen::VectorXd& slice) {
        return net_forward(net, slice.transpose()).activated(0, 0);
    };
}

}  // namespace

LogitHeadSet model_head_set(const DiscriminatorSet& discs) {
    if (discs.kind != ModelKind::factorgan)
        throw std::logic_error("model_head_set: baseline model has no factorized head set");
    LogitHeadSet set;
    set.layout = discs.layout;
    for (const auto& h : discs.marginal_heads) set.marginal_fns.push_back(frozen_head_fn(h));
    for (const auto& h : discs.p_heads) set.p_fns.push_back(frozen_head_fn(h));
    for (const auto& h : discs.q_heads) set.q_fns.push_back(frozen_head_fn(h));
    return set;
}

double model_combined_logit(const DiscriminatorSet& discs, const Eigen::VectorXd& x) {
    if (discs.kind == ModelKind::gan_baseline) {
        return head_logit(discs.joint_heads[0],
                          project_columns(x.transpose(), discs.joint_heads[0].input_dims)
                              .row(0)
                              .transpose());
    }
    return model_head_set(discs).combined_logit(x);
}

Eigen::MatrixXd stacked_marginal_pool(const DatasetSplit& data, const Partition& partition,
                                      const std::vector<int>& dims) {
    if (dims.empty()) throw std::invalid_argument("stacked_marginal_pool: empty dims");
    // The owning top-level part: marginal-head dims never straddle parts.
    int part_index = -1;
    for (int i = 0; i < partition.part_count(); ++i) {
        const auto& part = partition.parts[i];
        if (std::find(part.begin(), part.end(), dims[0]) != part.end()) {
            part_index = i;
            break;
        }
    }
    if (part_index < 0) throw std::invalid_argument("stacked_marginal_pool: dim not in partition");
    const auto& part = partition.parts[part_index];
    std::vector<int> local;  // positions of dims inside the unpaired pool's columns
    for (int d : dims) {
        auto it = std::find(part.begin(), part.end(), d);
        if (it == part.end())
            throw std::invalid_argument("stacked_marginal_pool: dims straddle parts");
        local.push_back(static_cast<int>(it - part.begin()));
    }

    Eigen::MatrixXd paired_part = project_columns(data.paired_pool, dims);
    const Eigen::MatrixXd& unpaired = data.unpaired_pools[static_cast<std::size_t>(part_index)];
    Eigen::MatrixXd pool(paired_part.rows() + unpaired.rows(), static_cast<Eigen::Index>(dims.size()));
    pool.topRows(paired_part.rows()) = paired_part;
    for (std::size_t k = 0; k < local.size(); ++k)
        pool.col(static_cast<Eigen::Index>(k)).tail(unpaired.rows()) = unpaired.col(local[k]);
    return pool;
}

Eigen::MatrixXd build_p_fake_batch(const Eigen::MatrixXd& paired_pool,
                                   const DependencyPairSpec& pair, int n, Rng& rng) {
    Eigen::MatrixXd decoupled = independent_real_batch(paired_pool, pair.decouple_parts, n, rng);
    return project_columns(decoupled, pair.scope);
}

Eigen::MatrixXd build_q_fake_batch(const Eigen::MatrixXd& generated,
                                   const DependencyPairSpec& pair, Rng& rng) {
    Eigen::MatrixXd shuffled = shuffle_fake_parts(generated, pair.decouple_parts, rng);
    return project_columns(shuffled, pair.scope);
}

ConditioningSource ConditioningSource::from_pool(Eigen::MatrixXd pool) {
    if (pool.rows() == 0)
        throw std::invalid_argument("ConditioningSource: empty conditioning pool");
    ConditioningSource src;
    src.active_ = true;
    src.pool_ = std::move(pool);
    return src;
}

ConditioningSource ConditioningSource::from_mixture_task(AdditiveMixtureTask task) {
    ConditioningSource src;
    src.active_ = true;
    src.use_mixture_ = true;
    src.mixture_task_ = std::move(task);
    return src;
}

Eigen::MatrixXd ConditioningSource::draw(int n, Rng& rng) const {
    if (!active_) throw std::logic_error("ConditioningSource: inactive source drawn");
    if (use_mixture_) return AdditiveMixtureTask::mixture_of(mixture_task_.sample_joint(n, rng));
    return sample_rows(pool_, n, rng);
}

DiscSetCritic::DiscSetCritic(const DiscriminatorSet& discs) {
    sample_dim_ = discs.layout.partition.total_dim;
    auto add = [&](const LogitHead& head, double sign) {
        HeadPass pass;
        pass.head = &head;
        pass.sign = sign;
        pass.normalized = frozen_norm_net(head);
        passes_.push_back(std::move(pass));
    };
    if (discs.kind == ModelKind::gan_baseline) {
        add(discs.joint_heads[0], 1.0);
        return;
    }
    for (const auto& h : discs.marginal_heads) add(h, 1.0);
    std::size_t p_idx = 0;
    for (std::size_t j = 0; j < discs.layout.pairs.size(); ++j) {
        if (discs.layout.pairs[j].has_p) add(discs.p_heads[p_idx++], 1.0);
        add(discs.q_heads[j], -1.0);
    }
}

Eigen::VectorXd DiscSetCritic::combined_logits(const Eigen::MatrixXd& samples) {
    batch_ = samples.rows();
    Eigen::VectorXd logits = Eigen::VectorXd::Zero(batch_);
    for (HeadPass& pass : passes_) {
        Eigen::MatrixXd slice = project_columns(samples, pass.head->input_dims);
        ForwardResult res = net_forward(pass.normalized, slice, &pass.cache);
        logits += pass.sign * res.activated.col(0);
    }
    return logits;
}

Eigen::MatrixXd DiscSetCritic::input_grad(const Eigen::VectorXd& upstream) {
    if (upstream.size() != batch_)
        throw std::invalid_argument("DiscSetCritic: upstream size mismatch");
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(batch_, sample_dim_);
    for (HeadPass& pass : passes_) {
        Eigen::MatrixXd up = pass.sign * upstream;
        NetGradients grads = net_backward(pass.normalized, pass.cache, up);
        scatter_add_columns(total, grads.input_grad, pass.head->input_dims);
    }
    return total;
}

double generator_update_with(GeneratorModel& gen, GenCritic& critic, int batch_size, Rng& rng,
                             const ConditioningSource& conditioning) {
    Eigen::MatrixXd cond;
    const Eigen::MatrixXd* cond_ptr = nullptr;
    if (gen.spec.conditioning_dim > 0) {
        cond = conditioning.draw(batch_size, rng);
        cond_ptr = &cond;
    }
    GenForward fwd = generator_forward(gen, batch_size, rng, cond_ptr);
    Eigen::VectorXd logits = critic.combined_logits(fwd.samples);
    double loss = gen_loss(logits);
    Eigen::VectorXd upstream = gen_loss_grads(logits);
    Eigen::MatrixXd sample_grad = critic.input_grad(upstream);
    Eigen::MatrixXd raw_grad = generator_sample_grad_to_raw(gen.spec, fwd, sample_grad);
    NetGradients grads = net_backward(gen.net, fwd.cache, raw_grad);
    adam_step(gen.net, grads, gen.adam);
    return loss;
}

Partition task_partition(const TaskVariant& task) {
    return std::visit([](const auto& t) { return t.partition(); }, task);
}

Eigen::MatrixXd task_sample_joint(const TaskVariant& task, int n, Rng& rng) {
    return std::visit([&](const auto& t) { return t.sample_joint(n, rng); }, task);
}

Eigen::MatrixXd task_sample_marginal(const TaskVariant& task, int part, int n, Rng& rng) {
    return std::visit([&](const auto& t) { return t.sample_marginal(part, n, rng); }, task);
}

HeadLayout layout_for(const TaskVariant& task, CombinationMode mode,
                      const std::optional<HierarchySpec>& hierarchy,
                      const std::optional<AutoregressiveSpec>& autoregressive) {
    Partition partition = task_partition(task);
    switch (mode) {
        case CombinationMode::joint: return make_joint_layout(partition);
        case CombinationMode::conditional: return make_conditional_layout(partition);
        case CombinationMode::independent_marginals: return make_independent_layout(partition);
        case CombinationMode::hierarchical: {
            if (hierarchy) return make_hierarchical_layout(partition, *hierarchy);
            HierarchySpec trivial;  // one sub-part per part: reduces to the joint layout
            for (const auto& part : partition.parts) trivial.sub_parts_per_part.push_back({part});
            return make_hierarchical_layout(partition, trivial);
        }
        case CombinationMode::autoregressive: {
            if (autoregressive) return make_autoregressive_layout(*autoregressive);
            AutoregressiveSpec spec;  // default order: partition order
            spec.ordered_parts = partition.parts;
            spec.total_dim = partition.total_dim;
            return make_autoregressive_layout(spec);
        }
    }
    throw std::logic_error("unreachable");
}

GeneratorSpec generator_spec_for(const TaskVariant& task, const TrainConfig& cfg,
                                 std::optional<GeneratorOutput> output_override) {
    Partition partition = task_partition(task);
    GeneratorSpec spec;
    spec.noise_dim = cfg.noise_dim;
    spec.hidden = cfg.gen_hidden;
    spec.sample_dim = partition.total_dim;

    const auto* mixture = std::get_if<AdditiveMixtureTask>(&task);
    bool mask_mode = mixture != nullptr &&
                     (!output_override || *output_override == GeneratorOutput::mixture_mask);
    if (output_override && *output_override == GeneratorOutput::mixture_mask && !mixture)
        throw std::invalid_argument("mixture_mask output needs the additive-mixture task");

    if (mask_mode) {
        if (cfg.combination_mode == CombinationMode::conditional)
            throw std::invalid_argument(
                "conditional combination is not supported with the mask generator");
        spec.output = GeneratorOutput::mixture_mask;
        spec.conditioning_dim = mixture->source_dim();
        spec.raw_output_dim = mixture->source_dim();
        spec.mask_a_dims = partition.parts[0];
        spec.mask_v_dims = partition.parts[1];
        return spec;
    }

    // None of the built-in tasks live in (0,1), so the working default is an
    // unsquashed output; sigmoid stays available via the override for data
    // that is bounded to the unit box.
    spec.output = output_override.value_or(GeneratorOutput::identity);
    if (cfg.combination_mode == CombinationMode::conditional) {
        spec.conditioning_dim = partition.part_dim(0);
        spec.conditioning_sample_dims = partition.parts[0];
        for (int i = 1; i < partition.part_count(); ++i)
            for (int d : partition.parts[i]) spec.output_dims.push_back(d);
    } else {
        for (int d = 0; d < partition.total_dim; ++d) spec.output_dims.push_back(d);
    }
    spec.raw_output_dim = static_cast<int>(spec.output_dims.size());
    return spec;
}

TrainSession::TrainSession(TrainingRunArgs args)
    : task_(std::move(args.task)),
      cfg_(args.cfg),
      split_spec_(args.split),
      opts_(args.opts),
      partition_(task_partition(task_)),
      train_rng_(Rng::derive_seed(cfg_.seed, kStreamTrain)),
      start_time_(std::chrono::steady_clock::now()) {
    if (cfg_.batch_size < 1 || cfg_.disc_updates_per_gen_update < 1 || cfg_.total_gen_steps < 0 ||
        cfg_.lr <= 0.0 || cfg_.noise_dim < 1 || cfg_.spectral_power_iterations < 1)
        throw std::invalid_argument("TrainSession: invalid training config");
    if (opts_.eval_interval < 0 || opts_.eval_sample_count < 2 || opts_.checkpoint_interval < 0)
        throw std::invalid_argument("TrainSession: invalid loop options");

    Rng data_rng(Rng::derive_seed(cfg_.seed, kStreamData));
    data_ = std::visit(
        [&](const auto& t) { return make_dataset_split(t, split_spec_, data_rng); }, task_);

    HeadLayout layout =
        layout_for(task_, cfg_.combination_mode, args.hierarchy, args.autoregressive);
    std::uint64_t init_seed = Rng::derive_seed(cfg_.seed, kStreamInit);
    discs_ = make_discriminators(cfg_.model_kind, layout, cfg_.disc_hidden, cfg_.lr, init_seed);
    for (LogitHead* head : discs_.ordered_heads())
        head->sn.power_iterations_per_step = cfg_.spectral_power_iterations;

    GeneratorSpec gen_spec = generator_spec_for(task_, cfg_, args.generator_output);
    gen_ = make_generator(gen_spec, cfg_.lr, Rng::derive_seed(init_seed, 0));

    if (cfg_.model_kind == ModelKind::factorgan) {
        for (const auto& m : layout.marginals)
            marginal_pools_.push_back(stacked_marginal_pool(data_, partition_, m.dims));
    }
    if (gen_spec.output == GeneratorOutput::mixture_mask) {
        conditioning_ =
            ConditioningSource::from_mixture_task(std::get<AdditiveMixtureTask>(task_));
    } else if (gen_spec.conditioning_dim > 0) {
        conditioning_ = ConditioningSource::from_pool(
            stacked_marginal_pool(data_, partition_, partition_.parts[0]));
    }
    last_disc_losses_.assign(discs_.head_names().size(), 0.0);
}

Eigen::MatrixXd TrainSession::generate_samples(int n, Rng& rng) {
    Eigen::MatrixXd cond;
    const Eigen::MatrixXd* cond_ptr = nullptr;
    if (gen_.spec.conditioning_dim > 0) {
        cond = conditioning_.draw(n, rng);
        cond_ptr = &cond;
    }
    return generator_forward(gen_, n, rng, cond_ptr).samples;
}

std::vector<double> TrainSession::disc_step() {
    std::vector<double> losses;
    Eigen::MatrixXd fake_joint = generate_samples(cfg_.batch_size, train_rng_);

    if (cfg_.model_kind == ModelKind::gan_baseline) {
        if (data_.paired_pool.rows() == 0)
            throw std::runtime_error("disc_step: joint head requires paired data");
        Eigen::MatrixXd real = sample_rows(data_.paired_pool, cfg_.batch_size, train_rng_);
        losses.push_back(update_head(discs_.joint_heads[0], real, fake_joint));
        last_disc_losses_ = losses;
        return losses;
    }

    for (std::size_t i = 0; i < discs_.marginal_heads.size(); ++i) {
        LogitHead& head = discs_.marginal_heads[i];
        if (marginal_pools_[i].rows() == 0)
            throw std::runtime_error("disc_step: no real data for " + head.name);
        Eigen::MatrixXd real = sample_rows(marginal_pools_[i], cfg_.batch_size, train_rng_);
        Eigen::MatrixXd fake = project_columns(fake_joint, head.input_dims);
        losses.push_back(update_head(head, real, fake));
    }
    std::size_t p_idx = 0;
    for (std::size_t j = 0; j < discs_.layout.pairs.size(); ++j) {
        const DependencyPairSpec& pair = discs_.layout.pairs[j];
        if (pair.has_p) {
            if (data_.paired_pool.rows() < 2)
                throw std::runtime_error("disc_step: p head requires at least 2 paired samples");
            Eigen::MatrixXd real = project_columns(
                sample_rows(data_.paired_pool, cfg_.batch_size, train_rng_), pair.scope);
            Eigen::MatrixXd fake =
                build_p_fake_batch(data_.paired_pool, pair, cfg_.batch_size, train_rng_);
            losses.push_back(update_head(discs_.p_heads[p_idx++], real, fake));
        }
        Eigen::MatrixXd q_real = project_columns(fake_joint, pair.scope);
        Eigen::MatrixXd q_fake = build_q_fake_batch(fake_joint, pair, train_rng_);
        losses.push_back(update_head(discs_.q_heads[j], q_real, q_fake));
    }
    last_disc_losses_ = losses;
    return losses;
}

double TrainSession::gen_step() {
    DiscSetCritic critic(discs_);
    last_gen_loss_ = generator_update_with(gen_, critic, cfg_.batch_size, train_rng_,
                                           conditioning_);
    any_gen_step_ = true;
    return last_gen_loss_;
}

MetricsRecord TrainSession::evaluate(int step) {
    MetricsRecord rec;
    rec.step = step;
    if (any_gen_step_) {
        rec.gen_loss = last_gen_loss_;
        for (double l : last_disc_losses_) rec.head_losses.emplace_back(l);
    } else {
        rec.head_losses.assign(last_disc_losses_.size(), std::nullopt);
    }

    Rng eval_rng(Rng::derive_seed(Rng::derive_seed(cfg_.seed, kStreamEval),
                                  static_cast<std::uint64_t>(step)));
    const int n = opts_.eval_sample_count;
    Eigen::MatrixXd gen_samples = generate_samples(n, eval_rng);
    for (int i = 0; i < partition_.part_count(); ++i) {
        Eigen::MatrixXd real_part = task_sample_marginal(task_, i, n, eval_rng);
        Eigen::MatrixXd gen_part = project_columns(gen_samples, partition_.parts[i]);
        rec.frechet_per_part.emplace_back(frechet_distance(real_part, gen_part));
    }
    if (const auto* cat = std::get_if<PairedCategoricalTask>(&task_)) {
        PartLabels labels = classify_parts(gen_samples, *cat);
        ClassTable gen_table = ClassTable::from_labels(labels.top, labels.bottom, cat->class_count);
        ClassTable real_table = ClassTable::from_joint(cat->analytic_class_table());
        std::optional<double> dep = dependency_metric(real_table, gen_table);
        if (dep) {
            rec.d_dep = *dep;
        } else {
            rec.d_dep_degenerate = true;
            std::fprintf(stderr,
                         "warning: step %d: dependency metric undefined (zero marginal cell)\n",
                         step);
        }
    }
    if (opts_.record_wall_time) {
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      start_time_)
                            .count();
    }
    return rec;
}

std::vector<NetworkSnapshot> TrainSession::snapshot() const {
    std::vector<NetworkSnapshot> nets;
    nets.push_back(snapshot_network(gen_.net, gen_.adam));
    for (const LogitHead* head : discs_.ordered_heads())
        nets.push_back(snapshot_network(head->net, head->adam));
    return nets;
}

TrainResult TrainSession::run(const MetricsSink& on_metrics) {
    namespace fs = std::filesystem;
    TrainResult out;
    out.head_names = discs_.head_names();
    out.frechet_part_count = partition_.part_count();
    if (!opts_.checkpoint_dir.empty()) fs::create_directories(opts_.checkpoint_dir);

    for (int k = 1; k <= cfg_.total_gen_steps; ++k) {
        for (int d = 0; d < cfg_.disc_updates_per_gen_update; ++d)
            out.disc_steps.push_back({k, disc_step()});
        out.gen_steps.push_back({k, gen_step()});

        bool eval_now =
            (opts_.eval_interval > 0 && k % opts_.eval_interval == 0) || k == cfg_.total_gen_steps;
        if (eval_now) {
            out.metrics.push_back(evaluate(k));
            if (on_metrics) on_metrics(out.metrics.back());
        }

        if (!opts_.checkpoint_dir.empty() && opts_.checkpoint_interval > 0 &&
            k % opts_.checkpoint_interval == 0 && k != cfg_.total_gen_steps) {
            char name[32];
            std::snprintf(name, sizeof(name), "step_%06d.fgan", k);
            save_checkpoint((fs::path(opts_.checkpoint_dir) / name).string(), snapshot());
        }
    }
    if (!opts_.checkpoint_dir.empty())
        save_checkpoint((fs::path(opts_.checkpoint_dir) / "final.fgan").string(), snapshot());
    out.generator = gen_;
    out.discriminators = discs_;
    return out;
}

TrainResult training_loop(const TrainingRunArgs& args) { return TrainSession(args).run(); }

LogitHead train_ratio_estimator(const Eigen::VectorXd& real_mean, const Eigen::MatrixXd& real_cov,
                                const Eigen::VectorXd& fake_mean, const Eigen::MatrixXd& fake_cov,
                                int steps, int batch_size, double lr,
                                const std::vector<int>& hidden, std::uint64_t seed) {
    if (real_mean.size() != fake_mean.size())
        throw std::invalid_argument("train_ratio_estimator: dimension mismatch");
    const int dim = static_cast<int>(real_mean.size());
    Eigen::LLT<Eigen::MatrixXd> real_llt(real_cov), fake_llt(fake_cov);
    if (real_llt.info() != Eigen::Success || fake_llt.info() != Eigen::Success)
        throw std::invalid_argument("train_ratio_estimator: covariance not positive definite");
    Eigen::MatrixXd real_chol = real_llt.matrixL();
    Eigen::MatrixXd fake_chol = fake_llt.matrixL();

    std::vector<int> input_dims(dim);
    for (int i = 0; i < dim; ++i) input_dims[i] = i;
    LogitHead head = make_logit_head("d_ratio", input_dims, hidden, lr,
                                     Rng::derive_seed(seed, kStreamInit));
    Rng rng(Rng::derive_seed(seed, kStreamTrain));
    auto draw = [&](const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol) {
        Eigen::MatrixXd batch(batch_size, dim);
        Eigen::VectorXd z(dim);
        for (int r = 0; r < batch_size; ++r) {
            for (int c = 0; c < dim; ++c) z(c) = rng.normal();
            batch.row(r) = (mean + chol * z).transpose();
        }
        return batch;
    };
    for (int s = 0; s < steps; ++s) {
        Eigen::MatrixXd real = draw(real_mean, real_chol);
        Eigen::MatrixXd fake = draw(fake_mean, fake_chol);
        update_head(head, real, fake);
    }
    return head;
}

}  // namespace fgan
