#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "swafdi/model.hpp"

namespace swafdi {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SwaModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const SwaModel& model);

SwaModel load_model(const std::string& path);
void save_model(const SwaModel& model, const std::string& path);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// CSV with header t,u_1..u_{n_u},y_1..y_{n_y}, 17 significant digits.
void write_trajectory_csv(const Trajectory& data, std::ostream& out);
void save_trajectory(const Trajectory& data, const std::string& path);

/// Reads the CSV written by write_trajectory_csv. Column names decide which
/// columns are inputs and which are outputs.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory load_trajectory(const std::string& path);

}  // namespace swafdi
