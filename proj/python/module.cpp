// Python bindings for the main operations.

#include "skts/baselines.hpp"
#include "skts/em.hpp"
#include "skts/experiment.hpp"
#include "skts/realtime.hpp"
#include "skts/scenarios.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace skts;

namespace {

MeasurementBlock make_block(std::vector<Vec> observations, std::vector<Mat> system_matrices) {
  MeasurementBlock mb;
  mb.observations = std::move(observations);
  mb.system_matrices = std::move(system_matrices);
  mb.check_consistent();
  return mb;
}

}  // namespace

PYBIND11_MODULE(sktspy, m) {
  m.doc() = "Sparse Kalman tree search: recovery of simultaneously sparse, "
            "temporally correlated signals from sequential measurements";

  py::class_<StateSpaceModel>(m, "StateSpaceModel")
      .def_static("diagonal",
                  py::overload_cast<const RealVec&, const RealVec&, double>(
                      &StateSpaceModel::diagonal),
                  py::arg("ar_coeff"), py::arg("amp_var"), py::arg("meas_noise_var"))
      .def_static("diagonal_scalar",
                  py::overload_cast<int, double, double, double>(&StateSpaceModel::diagonal),
                  py::arg("dim"), py::arg("ar_coeff"), py::arg("amp_var"),
                  py::arg("meas_noise_var"))
      .def_readwrite("dim", &StateSpaceModel::dim)
      .def_readwrite("state_transition", &StateSpaceModel::state_transition)
      .def_readwrite("process_noise_cov", &StateSpaceModel::process_noise_cov)
      .def_readwrite("meas_noise_var", &StateSpaceModel::meas_noise_var)
      .def_readwrite("prior_mean", &StateSpaceModel::prior_mean)
      .def_readwrite("prior_cov", &StateSpaceModel::prior_cov);

  m.def("validate_model", &validate_model, py::arg("model"));

  py::class_<SupportVector>(m, "SupportVector")
      .def_static("from_indices", &SupportVector::from_indices, py::arg("dim"), py::arg("indices"))
      .def_static("all_ones", &SupportVector::all_ones, py::arg("dim"))
      .def("indices", &SupportVector::indices)
      .def("sparsity", &SupportVector::sparsity)
      .def("__len__", &SupportVector::size)
      .def("__eq__", [](const SupportVector& a, const SupportVector& b) { return a == b; });

  py::class_<MeasurementBlock>(m, "MeasurementBlock")
      .def(py::init(&make_block), py::arg("observations"), py::arg("system_matrices"))
      .def_readonly("observations", &MeasurementBlock::observations)
      .def_readonly("system_matrices", &MeasurementBlock::system_matrices);

  py::class_<PosteriorStats>(m, "PosteriorStats")
      .def_readonly("means", &PosteriorStats::means)
      .def_readonly("covs", &PosteriorStats::covs);

  py::class_<EmStatistics>(m, "EmStatistics")
      .def_readonly("d", &EmStatistics::d)
      .def_readonly("phi", &EmStatistics::phi);

  py::class_<SignalEstimate>(m, "SignalEstimate")
      .def_readonly("h_hat", &SignalEstimate::h_hat)
      .def_readonly("support", &SignalEstimate::support);

  m.def("smooth", &smooth, py::arg("model"), py::arg("block"), py::arg("support"));
  m.def("batch_lmmse_oracle", &batch_lmmse_oracle, py::arg("model"), py::arg("block"),
        py::arg("support"), py::arg("max_joint_dim") = 4096);
  m.def("accumulate_statistics", &accumulate_statistics, py::arg("block"), py::arg("posterior"));
  m.def("q_score", &q_score, py::arg("stats"), py::arg("support"));
  m.def("greedy_tree_search", &greedy_tree_search, py::arg("stats"), py::arg("sparsity"),
        py::arg("tree_width"));
  m.def("estimate_sparsity_order", &estimate_sparsity_order, py::arg("block"),
        py::arg("threshold"));

  py::class_<SktsConfig>(m, "SktsConfig")
      .def(py::init<>())
      .def_static("standard", &SktsConfig::standard, py::arg("target_sparsity"))
      .def_readwrite("tree_width", &SktsConfig::tree_width)
      .def_readwrite("sparsity_schedule", &SktsConfig::sparsity_schedule);

  m.def(
      "run_skts",
      [](const StateSpaceModel& model, const MeasurementBlock& block, const SktsConfig& cfg) {
        return run_skts(model, block, cfg);
      },
      py::arg("model"), py::arg("block"), py::arg("config"));

  m.def("conventional_ks", &conventional_ks, py::arg("model"), py::arg("block"));
  m.def("oracle_ks", &oracle_ks, py::arg("model"), py::arg("block"), py::arg("true_support"));
  m.def(
      "omp_per_snapshot",
      [](const Vec& y, const Mat& b, int sparsity) {
        OmpResult r = omp_per_snapshot(y, b, sparsity);
        return py::make_tuple(r.support, r.amplitudes);
      },
      py::arg("y"), py::arg("B"), py::arg("sparsity"));

  py::class_<RtConfig>(m, "RtConfig")
      .def(py::init<>())
      .def_readwrite("forgetting_factor", &RtConfig::forgetting_factor)
      .def_readwrite("num_stages", &RtConfig::num_stages)
      .def_readwrite("tree_width", &RtConfig::tree_width)
      .def_readwrite("sparsity", &RtConfig::sparsity)
      .def_readwrite("warmup_len", &RtConfig::warmup_len);

  py::class_<RtState>(m, "RtState")
      .def(py::init<const StateSpaceModel&, const RtConfig&>(), py::arg("model"), py::arg("config"))
      .def("step", &RtState::step, py::arg("y"), py::arg("B"))
      .def("support", &RtState::support, py::arg("stage") = 0);

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("signal_dim", &SyntheticConfig::signal_dim)
      .def_readwrite("meas_dim", &SyntheticConfig::meas_dim)
      .def_readwrite("sparsity", &SyntheticConfig::sparsity)
      .def_readwrite("block_len", &SyntheticConfig::block_len)
      .def_readwrite("num_blocks", &SyntheticConfig::num_blocks)
      .def_readwrite("ar_coeff", &SyntheticConfig::ar_coeff)
      .def_readwrite("amplitude_var", &SyntheticConfig::amplitude_var)
      .def_readwrite("snr_db", &SyntheticConfig::snr_db)
      .def_readwrite("seed", &SyntheticConfig::seed)
      .def("model", &SyntheticConfig::model);

  py::class_<BlockData>(m, "BlockData")
      .def_readonly("support", &BlockData::support)
      .def_readonly("h", &BlockData::h)
      .def_readonly("y", &BlockData::y)
      .def("measurements", &BlockData::measurements, py::arg("block_index") = 0);

  py::class_<SyntheticTrace>(m, "SyntheticTrace")
      .def_readonly("blocks", &SyntheticTrace::blocks)
      .def_readonly("meas_noise_var", &SyntheticTrace::meas_noise_var);

  m.def("generate_synthetic", &generate_synthetic, py::arg("config"));
  m.def("compute_mse_db", &compute_mse_db, py::arg("truth"), py::arg("estimate"));
}
