#include "kreg/model_io.hpp"

#include "kreg/errors.hpp"

#include <json.hpp>

namespace kreg {

using json = nlohmann::ordered_json;

std::string model_to_json(const Model& model) {
    json doc;
    doc["intercept"] = model.intercept;
    doc["alpha"] = std::vector<double>(model.alpha.data(), model.alpha.data() + model.alpha.size());
    json kernel;
    kernel["family"] = to_string(model.kernel.family);
    if (model.kernel.family == KernelFamily::Radial) kernel["gamma"] = model.kernel.gamma;
    doc["kernel"] = kernel;
    doc["lambda"] = model.lambda;
    doc["objective"] = model.objective_value;
    doc["n"] = model.training_inputs.rows();
    doc["d"] = model.training_inputs.cols();
    doc["loss"] = to_string(model.loss);
    json rows = json::array();
    for (Eigen::Index i = 0; i < model.training_inputs.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < model.training_inputs.cols(); ++k) row.push_back(model.training_inputs(i, k));
        rows.push_back(std::move(row));
    }
    doc["training_inputs"] = std::move(rows);
    return doc.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("model JSON: ") + e.what());
    }
    try {
        Model model;
        model.intercept = doc.at("intercept").get<double>();
        const auto alpha = doc.at("alpha").get<std::vector<double>>();
        model.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
        const auto& kernel = doc.at("kernel");
        model.kernel.family = parse_kernel_family(kernel.at("family").get<std::string>());
        model.kernel.gamma = model.kernel.family == KernelFamily::Radial ? kernel.at("gamma").get<double>() : 0.0;
        model.kernel.validate();
        model.lambda = doc.at("lambda").get<double>();
        model.objective_value = doc.at("objective").get<double>();
        model.loss = parse_loss(doc.at("loss").get<std::string>());
        const auto n = doc.at("n").get<Eigen::Index>();
        const auto d = doc.at("d").get<Eigen::Index>();
        const auto& rows = doc.at("training_inputs");
        if (static_cast<Eigen::Index>(rows.size()) != n || model.alpha.size() != n) {
            throw ParseError(0, "model JSON: n does not match alpha/training_inputs");
        }
        model.training_inputs.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rows.at(static_cast<std::size_t>(i));
            if (static_cast<Eigen::Index>(row.size()) != d) {
                throw ParseError(0, "model JSON: training input row " + std::to_string(i) + " has wrong length");
            }
            for (Eigen::Index k = 0; k < d; ++k) model.training_inputs(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("model JSON: ") + e.what());
    }
}

}  // namespace kreg
