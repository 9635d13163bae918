#include "edgereg/registration.hpp"

#include <chrono>
#include <cmath>

#include "edgereg/edge_map.hpp"
#include "edgereg/similarity.hpp"

namespace edgereg {

std::string to_string(ImageLoss loss) {
    switch (loss) {
        case ImageLoss::lncc: return "lncc";
        case ImageLoss::nmi: return "nmi";
        case ImageLoss::ngf: return "ngf";
        case ImageLoss::mse: return "mse";
    }
    return "?";
}

std::string to_string(EdgeLoss loss) {
    switch (loss) {
        case EdgeLoss::lncc: return "lncc";
        case EdgeLoss::mse: return "mse";
        case EdgeLoss::none: return "none";
    }
    return "?";
}

std::string to_string(TransformModel model) {
    return model == TransformModel::svf_dense ? "svf-dense" : "svf-bspline";
}

ImageLoss image_loss_from_string(const std::string& name) {
    if (name == "lncc") return ImageLoss::lncc;
    if (name == "nmi") return ImageLoss::nmi;
    if (name == "ngf") return ImageLoss::ngf;
    if (name == "mse") return ImageLoss::mse;
    throw data_error("unknown image loss \"" + name + "\"");
}

EdgeLoss edge_loss_from_string(const std::string& name) {
    if (name == "lncc") return EdgeLoss::lncc;
    if (name == "mse") return EdgeLoss::mse;
    if (name == "none") return EdgeLoss::none;
    throw data_error("unknown edge loss \"" + name + "\"");
}

TransformModel transform_model_from_string(const std::string& name) {
    if (name == "svf-dense") return TransformModel::svf_dense;
    if (name == "svf-bspline") return TransformModel::svf_bspline;
    throw data_error("unknown transform model \"" + name + "\"");
}

void RegistrationConfig::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
        throw data_error("RegistrationConfig: lambda weights must be non-negative");
    if (lambda1 + lambda2 <= 0.0)
        throw data_error("RegistrationConfig: lambda1 + lambda2 must be positive");
    if (levels < 1) throw data_error("RegistrationConfig: levels must be >= 1");
    if (iters_per_level < 1) throw data_error("RegistrationConfig: iters_per_level must be >= 1");
    if (spacing < 2) throw data_error("RegistrationConfig: spacing must be >= 2");
    if (window < 3 || window % 2 == 0)
        throw data_error("RegistrationConfig: window must be odd and >= 3");
    if (bins < 8) throw data_error("RegistrationConfig: bins must be >= 8");
    if (sigma_ratio <= 0.0) throw data_error("RegistrationConfig: sigma_ratio must be positive");
    if (eps_rel <= 0.0) throw data_error("RegistrationConfig: eps_rel must be positive");
    if (sigma_pre < 0.0) throw data_error("RegistrationConfig: sigma_pre must be >= 0");
    SquaringConfig{squaring_steps}.validate();
    optimizer.validate();
}

VelocityModel VelocityModel::dense(int width, int height) {
    VelocityModel m;
    m.kind = TransformModel::svf_dense;
    m.width = width;
    m.height = height;
    return m;
}

VelocityModel VelocityModel::bspline(int width, int height, int spacing) {
    VelocityModel m;
    m.kind = TransformModel::svf_bspline;
    m.width = width;
    m.height = height;
    m.spacing = spacing;
    const BSplineGrid grid = make_bspline_grid(width, height, spacing);
    m.cp_width = grid.cp_width;
    m.cp_height = grid.cp_height;
    return m;
}

size_t VelocityModel::param_count() const {
    if (kind == TransformModel::svf_dense) return 2 * static_cast<size_t>(width) * height;
    return 2 * static_cast<size_t>(cp_width) * cp_height;
}

VectorField2D VelocityModel::densify(const std::vector<double>& params) const {
    if (params.size() != param_count())
        throw data_error("VelocityModel::densify: parameter count mismatch");
    if (kind == TransformModel::svf_dense) {
        VectorField2D v(width, height);
        v.comp = params;
        return v;
    }
    BSplineGrid grid = make_bspline_grid(width, height, spacing);
    grid.control_points = params;
    return bspline_to_dense(grid, width, height);
}

std::vector<double> VelocityModel::pullback(const VectorField2D& dL_dv,
                                            const std::vector<double>& params) const {
    if (kind == TransformModel::svf_dense) return dL_dv.comp;
    BSplineGrid grid = make_bspline_grid(width, height, spacing);
    grid.control_points = params;
    return bspline_adjoint(grid, dL_dv).control_points;
}

VelocityModel velocity_model_for(const RegistrationConfig& cfg, int width, int height) {
    return cfg.model == TransformModel::svf_dense
        ? VelocityModel::dense(width, height)
        : VelocityModel::bspline(width, height, cfg.spacing);
}

namespace {

ImageLossResult eval_image_loss(ImageLoss kind, const Image2D& F, const Image2D& M,
                                const RegistrationConfig& cfg) {
    switch (kind) {
        case ImageLoss::lncc: return lncc(F, M, cfg.window, cfg.lncc_eps);
        case ImageLoss::nmi: return nmi(F, M, cfg.bins, cfg.sigma_ratio);
        case ImageLoss::ngf: return ngf(F, M, cfg.eps_rel);
        case ImageLoss::mse: return mse(F, M);
    }
    throw data_error("eval_image_loss: invalid loss");
}

ImageLossResult eval_edge_loss(EdgeLoss kind, const Image2D& E_F, const Image2D& E_M,
                               const RegistrationConfig& cfg) {
    switch (kind) {
        case EdgeLoss::lncc: return lncc(E_F, E_M, cfg.window, cfg.lncc_eps);
        case EdgeLoss::mse: return mse(E_F, E_M);
        case EdgeLoss::none: break;
    }
    throw data_error("eval_edge_loss: invalid loss");
}

} // namespace

std::pair<LossTerms, std::vector<double>> composite_loss_and_grad(
    const Image2D& F, const Image2D& M, const Image2D& E_F, const Image2D& E_M,
    const std::vector<double>& params, const VelocityModel& model,
    const RegistrationConfig& cfg) {
    if (!F.same_shape(M)) throw data_error("composite_loss_and_grad: F/M shapes differ");
    const bool edge_active = cfg.ed_sim != EdgeLoss::none && cfg.lambda2 != 0.0;
    if (edge_active && (!F.same_shape(E_F) || !F.same_shape(E_M)))
        throw data_error("composite_loss_and_grad: edge map shapes differ");

    const SquaringConfig squaring{cfg.squaring_steps};
    const VectorField2D v = model.densify(params);
    const VectorField2D u = svf_exp(v, squaring);

    LossTerms terms;
    VectorField2D dL_du(v.width, v.height);

    if (cfg.lambda1 != 0.0) {
        const Image2D warped = warp_image(M, u);
        const ImageLossResult im = eval_image_loss(cfg.im_sim, F, warped, cfg);
        terms.l1 = cfg.lambda1 * im.value;
        const VectorField2D adj = warp_adjoint(M, u, im.grad);
        for (size_t i = 0; i < dL_du.comp.size(); ++i)
            dL_du.comp[i] += cfg.lambda1 * adj.comp[i];
    }
    if (edge_active) {
        const Image2D warped_e = warp_image(E_M, u);
        const ImageLossResult ed = eval_edge_loss(cfg.ed_sim, E_F, warped_e, cfg);
        terms.l2 = cfg.lambda2 * ed.value;
        const VectorField2D adj = warp_adjoint(E_M, u, ed.grad);
        for (size_t i = 0; i < dL_du.comp.size(); ++i)
            dL_du.comp[i] += cfg.lambda2 * adj.comp[i];
    }

    VectorField2D dL_dv = svf_exp_adjoint(v, squaring, dL_du);
    if (cfg.lambda3 != 0.0) {
        const FieldLossResult reg = reg_diffusion(v);
        terms.l3 = cfg.lambda3 * reg.value;
        for (size_t i = 0; i < dL_dv.comp.size(); ++i)
            dL_dv.comp[i] += cfg.lambda3 * reg.grad.comp[i];
    }

    terms.total = terms.l1 + terms.l2 + terms.l3;
    if (!std::isfinite(terms.total))
        throw divergence_error("composite loss is non-finite", -1);
    return {terms, model.pullback(dL_dv, params)};
}

Image2D downsample_half(const Image2D& img) {
    const int w = img.width / 2, h = img.height / 2;
    if (w < 1 || h < 1) throw data_error("downsample_half: image too small");
    Image2D out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = 0.25 * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                                   img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1));
    return out;
}

VectorField2D upsample_velocity(const VectorField2D& coarse, int width, int height) {
    VectorField2D out(width, height);
    for (int y = 0; y < height; ++y) {
        const double py = (y + 0.5) * 0.5 - 0.5;
        for (int x = 0; x < width; ++x) {
            const double px = (x + 0.5) * 0.5 - 0.5;
            const BilinearLocation loc = locate_bilinear(px, py, coarse.width, coarse.height);
            const double w00 = loc.w00(), w10 = loc.w10(), w01 = loc.w01(), w11 = loc.w11();
            // Pixel units halve between levels, so vector lengths double.
            out.dx(x, y) = 2.0 * (w00 * coarse.dx(loc.x0, loc.y0) + w10 * coarse.dx(loc.x1, loc.y0) +
                                  w01 * coarse.dx(loc.x0, loc.y1) + w11 * coarse.dx(loc.x1, loc.y1));
            out.dy(x, y) = 2.0 * (w00 * coarse.dy(loc.x0, loc.y0) + w10 * coarse.dy(loc.x1, loc.y0) +
                                  w01 * coarse.dy(loc.x0, loc.y1) + w11 * coarse.dy(loc.x1, loc.y1));
        }
    }
    return out;
}

namespace {

// Coarse-to-fine parameter transfer. Dense fields are upsampled directly;
// B-spline lattices are seeded by sampling the coarse spline at the new
// control locations (a quasi-interpolation warm start the next level refines).
std::vector<double> transfer_params(const std::vector<double>& params,
                                    const VelocityModel& coarse, const VelocityModel& fine) {
    if (coarse.kind == TransformModel::svf_dense) {
        VectorField2D cf(coarse.width, coarse.height);
        cf.comp = params;
        return upsample_velocity(cf, fine.width, fine.height).comp;
    }
    BSplineGrid cg = make_bspline_grid(coarse.width, coarse.height, coarse.spacing);
    cg.control_points = params;
    BSplineGrid fg = make_bspline_grid(fine.width, fine.height, fine.spacing);
    for (int j = 0; j < fg.cp_height; ++j) {
        for (int i = 0; i < fg.cp_width; ++i) {
            const double fx = static_cast<double>((i - 1) * fine.spacing);
            const double fy = static_cast<double>((j - 1) * fine.spacing);
            const double cx = std::min(std::max((fx + 0.5) * 0.5 - 0.5, 0.0),
                                       static_cast<double>(coarse.width - 1));
            const double cy = std::min(std::max((fy + 0.5) * 0.5 - 0.5, 0.0),
                                       static_cast<double>(coarse.height - 1));
            double vx, vy;
            bspline_eval(cg, cx, cy, vx, vy);
            fg.cx(i, j) = 2.0 * vx;
            fg.cy(i, j) = 2.0 * vy;
        }
    }
    return fg.control_points;
}

} // namespace

RegistrationResult register_pair(const Image2D& F, const Image2D& M,
                                 const RegistrationConfig& cfg) {
    cfg.validate();
    if (!F.same_shape(M)) throw data_error("register_pair: image shapes differ");
    if (F.width < 16 || F.height < 16)
        throw data_error("register_pair: images must be at least 16x16");
    const auto t_start = std::chrono::steady_clock::now();

    // Pyramid, coarsest first.
    std::vector<Image2D> pyr_f(cfg.levels), pyr_m(cfg.levels);
    pyr_f[cfg.levels - 1] = F;
    pyr_m[cfg.levels - 1] = M;
    for (int l = cfg.levels - 2; l >= 0; --l) {
        pyr_f[l] = downsample_half(pyr_f[l + 1]);
        pyr_m[l] = downsample_half(pyr_m[l + 1]);
    }

    const bool edge_active = cfg.ed_sim != EdgeLoss::none && cfg.lambda2 != 0.0;
    RegistrationResult result;
    std::vector<double> params;
    VelocityModel model;

    for (int level = 0; level < cfg.levels; ++level) {
        const Image2D& f = pyr_f[level];
        const Image2D& m = pyr_m[level];
        Image2D e_f, e_m;
        if (edge_active) {
            e_f = edge_map(f, cfg.sigma_pre, cfg.edge_normalize);
            e_m = edge_map(m, cfg.sigma_pre, cfg.edge_normalize);
        }

        const VelocityModel level_model = velocity_model_for(cfg, f.width, f.height);
        if (level == 0) {
            params.assign(level_model.param_count(), 0.0);
        } else {
            params = transfer_params(params, model, level_model);
        }
        model = level_model;

        AdamState state(params.size());
        for (int iter = 0; iter < cfg.iters_per_level; ++iter) {
            try {
                auto [terms, grad] = composite_loss_and_grad(f, m, e_f, e_m, params, model, cfg);
                result.loss_history.push_back(terms);
                adam_step(state, params, grad, cfg.optimizer);
            } catch (const divergence_error& e) {
                throw divergence_error(std::string(e.what()) + " at level " +
                                           std::to_string(level),
                                       iter);
            }
        }
    }

    const VectorField2D v = model.densify(params);
    result.displacement = svf_exp(v, SquaringConfig{cfg.squaring_steps});
    if (cfg.model == TransformModel::svf_dense) {
        result.velocity = v;
    } else {
        BSplineGrid grid = make_bspline_grid(model.width, model.height, model.spacing);
        grid.control_points = params;
        result.velocity = std::move(grid);
    }
    result.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_start)
                            .count();
    return result;
}

} // namespace edgereg
