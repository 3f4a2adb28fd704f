#pragma once

#include <string>

#include <json.hpp>

#include "ceo/extremal.hpp"
#include "ceo/fisher.hpp"

namespace ceo {

using Json = nlohmann::json;

/// Matrices travel as row-major nested arrays of binary64 values; nlohmann
/// serializes doubles with shortest round-trip text, so re-reading is exact.
Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j, const char* what);

/// The single nats-to-bits conversion point.
double nats_to_bits(double nats);

ProblemInstance instance_from_json(const Json& j);
Json instance_to_json(const ProblemInstance& instance);

/// Parses, symmetrizes near-symmetric inputs, and returns the instance;
/// throws std::runtime_error with a parse diagnostic on malformed files.
ProblemInstance load_instance(const std::string& path);

Json validation_to_json(const ValidationReport& report);

Json solution_to_json(const ProblemInstance& instance,
                      const BtSolution& solution);
BtSolution solution_from_json(const ProblemInstance& instance, const Json& j);

Json certificate_to_json(const KktCertificate& cert);
KktCertificate certificate_from_json(const Json& j);

Json kkt_report_to_json(const KktReport& report);
Json spectral_to_json(const SpectralDecomposition& decomp);
Json spectral_report_to_json(const SpectralReport& report);
Json path_report_to_json(const PathReport& report, bool include_samples);
Json extremal_report_to_json(const ExtremalReport& report);
Json chain_report_to_json(const ChainReport& report);
Json lemma_suite_to_json(const LemmaSuiteReport& report);

GaussianTestChannel channel_from_json(const Json& j, int m, int L);
Json channel_to_json(const GaussianTestChannel& channel);

/// 17-significant-digit, locale-free decimal text (bit-faithful binary64).
std::string format_sig17(double v);

}  // namespace ceo
