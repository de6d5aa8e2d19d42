#include "bjj/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>
#include <openssl/opensslv.h>

#include <string>

#ifndef BJJ_VERSION
#define BJJ_VERSION "unknown"
#endif

namespace bjj {

nlohmann::json build_info() {
    const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
    const std::string boost = std::to_string(BOOST_VERSION / 100000) + "." +
                              std::to_string(BOOST_VERSION / 100 % 1000) + "." + std::to_string(BOOST_VERSION % 100);
    return {
        {"bjj_sim", BJJ_VERSION},
        {"compiler", __VERSION__},
        {"cxx_standard", static_cast<long>(__cplusplus)},
        {"eigen", eigen},
        {"boost", boost},
        {"fftw", std::string(fftw_version)},
        {"openssl", OPENSSL_VERSION_TEXT},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
    };
}

}  // namespace bjj
