#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "edgereg/bspline.hpp"
#include "edgereg/image.hpp"
#include "edgereg/optim.hpp"
#include "edgereg/transform.hpp"

namespace edgereg {

enum class ImageLoss { lncc, nmi, ngf, mse };
enum class EdgeLoss { lncc, mse, none };
enum class TransformModel { svf_dense, svf_bspline };

std::string to_string(ImageLoss loss);
std::string to_string(EdgeLoss loss);
std::string to_string(TransformModel model);
ImageLoss image_loss_from_string(const std::string& name);
EdgeLoss edge_loss_from_string(const std::string& name);
TransformModel transform_model_from_string(const std::string& name);

/// Weights, loss selections, transform model and optimizer settings for one
/// registration. Defaults follow the engine-wide conventions.
struct RegistrationConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 0.1;
    ImageLoss im_sim = ImageLoss::lncc;
    EdgeLoss ed_sim = EdgeLoss::lncc;
    TransformModel model = TransformModel::svf_dense;
    int spacing = 8;          // B-spline control spacing, px
    int squaring_steps = 6;   // K
    int levels = 3;
    int iters_per_level = 300;
    OptimizerConfig optimizer;
    int window = 9;           // LNCC window
    double lncc_eps = 1e-5;
    int bins = 64;            // NMI bins
    double sigma_ratio = 0.5; // NMI Parzen kernel width, bins
    double eps_rel = 0.01;    // NGF relative epsilon
    double sigma_pre = 1.0;   // edge-map pre-smoothing, px
    bool edge_normalize = true;
    uint64_t seed = 0;

    void validate() const;
};

std::string registration_config_to_json(const RegistrationConfig& cfg);
RegistrationConfig registration_config_from_json(const std::string& json_text);

/// The three weighted loss terms; total = l1 + l2 + l3.
struct LossTerms {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;
    double total = 0.0;
};

struct RegistrationResult {
    std::variant<VectorField2D, BSplineGrid> velocity;
    VectorField2D displacement; // exp of the densified velocity
    std::vector<LossTerms> loss_history;
    double runtime_ms = 0.0;
};

/// Shape adapter between flat parameter vectors and velocity fields for the
/// two transform models.
struct VelocityModel {
    TransformModel kind = TransformModel::svf_dense;
    int width = 0;
    int height = 0;
    int spacing = 0;
    int cp_width = 0;
    int cp_height = 0;

    static VelocityModel dense(int width, int height);
    static VelocityModel bspline(int width, int height, int spacing);

    size_t param_count() const;
    VectorField2D densify(const std::vector<double>& params) const;
    /// Chains a dense-velocity gradient back to parameter space.
    std::vector<double> pullback(const VectorField2D& dL_dv, const std::vector<double>& params) const;
};

VelocityModel velocity_model_for(const RegistrationConfig& cfg, int width, int height);

/// Composite loss of the shared-deformation objective:
/// L1 = lambda1 * im_sim(F, M o phi), L2 = lambda2 * ed_sim(E_F, E_M o phi),
/// L3 = lambda3 * reg(v), with one velocity field serving both branches.
/// Returns the loss terms and dL/d(params).
std::pair<LossTerms, std::vector<double>> composite_loss_and_grad(
    const Image2D& F, const Image2D& M, const Image2D& E_F, const Image2D& E_M,
    const std::vector<double>& params, const VelocityModel& model, const RegistrationConfig& cfg);

/// Multi-resolution registration of M onto F. Images are used as given
/// (normalize beforehand for raw inputs); edge maps are recomputed per
/// pyramid level.
RegistrationResult register_pair(const Image2D& F, const Image2D& M,
                                 const RegistrationConfig& cfg);

/// 2x2 mean pooling (odd trailing row/column dropped).
Image2D downsample_half(const Image2D& img);

/// Bilinear upsampling of a velocity field to (width, height) with vectors
/// doubled, for coarse-to-fine transfer.
VectorField2D upsample_velocity(const VectorField2D& coarse, int width, int height);

} // namespace edgereg
