#include "dvn/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "dvn/errors.hpp"

namespace dvn {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw io_error(std::string("load_model: missing field '") + field + "'");
    return *it;
}

}  // namespace

void save_model(const std::string& path, const DvnModel& model) {
    json j;
    j["version"] = kModelSchemaVersion;
    j["sample_rate"] = model.sample_rate;
    j["late_start"] = model.late_start;
    j["post_filter"] = {{"b0", model.post_filter.b0}, {"a", model.post_filter.a}};

    json dcs = json::array();
    for (const DcBlocker& dc : model.dc_blockers) dcs.push_back({{"R", dc.pole_radius}});
    j["dc_blockers"] = dcs;

    json dict = json::array();
    for (const DictionaryFilter& f : model.dictionary) {
        if (f.allpole.order() != 2)
            throw io_error("save_model: dictionary filter is not second order");
        dict.push_back({{"b0", f.allpole.b0},
                        {"a1", f.allpole.a[0]},
                        {"a2", f.allpole.a[1]},
                        {"source_frame", f.source_frame}});
    }
    j["dictionary"] = dict;

    j["framing"] = {{"fft_length", model.framing.fft_length},
                    {"window_length", model.framing.window_length},
                    {"hop", model.framing.hop}};
    j["frame_gains"] = model.frame_gains;
    j["gain_times"] = model.gain_times;

    json prob = json::array();
    for (std::size_t c = 0; c < model.prob_matrix.cols; ++c) {
        auto col = model.prob_matrix.col(c);
        prob.push_back(std::vector<double>(col.begin(), col.end()));
    }
    j["prob_matrix"] = prob;
    j["prob_times"] = model.prob_times;

    j["density"] = {{"start", model.density.start_density},
                    {"end", model.density.end_density},
                    {"duration", model.density.duration}};
    j["seed"] = model.seed;
    if (model.gate) j["gate"] = *model.gate;
    if (!model.early_part.empty()) j["early_part"] = model.early_part;

    std::ofstream out(path);
    if (!out) throw io_error("save_model: cannot open " + path);
    out << j.dump(1) << '\n';
    if (!out) throw io_error("save_model: write failed for " + path);
}

DvnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_model: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error(std::string("load_model: invalid JSON: ") + e.what());
    }

    int version = require(j, "version").get<int>();
    if (version != kModelSchemaVersion)
        throw io_error("load_model: unsupported schema version " + std::to_string(version));

    DvnModel model;
    try {
        model.sample_rate = require(j, "sample_rate").get<double>();
        model.late_start = require(j, "late_start").get<std::int64_t>();

        const json& pf = require(j, "post_filter");
        model.post_filter.b0 = require(pf, "b0").get<double>();
        model.post_filter.a = require(pf, "a").get<std::vector<double>>();

        for (const json& dc : require(j, "dc_blockers"))
            model.dc_blockers.push_back(DcBlocker{require(dc, "R").get<double>()});

        const json& framing = require(j, "framing");
        model.framing.fft_length = require(framing, "fft_length").get<std::size_t>();
        model.framing.window_length = require(framing, "window_length").get<std::size_t>();
        model.framing.hop = require(framing, "hop").get<std::size_t>();
        model.framing.validate();

        for (const json& f : require(j, "dictionary")) {
            DictionaryFilter filt;
            filt.allpole.b0 = require(f, "b0").get<double>();
            filt.allpole.a = {require(f, "a1").get<double>(), require(f, "a2").get<double>()};
            filt.source_frame = require(f, "source_frame").get<int>();
            filt.magnitude = allpole_magnitudes(filt.allpole, model.framing.fft_length);
            model.dictionary.push_back(std::move(filt));
        }

        model.frame_gains = require(j, "frame_gains").get<std::vector<double>>();
        model.gain_times = require(j, "gain_times").get<std::vector<double>>();
        model.prob_times = require(j, "prob_times").get<std::vector<double>>();

        const json& prob = require(j, "prob_matrix");
        const std::size_t n = model.dictionary.size();
        model.prob_matrix = Matrix(n, prob.size());
        for (std::size_t c = 0; c < prob.size(); ++c) {
            auto col = prob[c].get<std::vector<double>>();
            if (col.size() != n)
                throw io_error("load_model: prob_matrix column " + std::to_string(c) +
                               " has wrong length");
            std::copy(col.begin(), col.end(), model.prob_matrix.col(c).begin());
        }

        const json& density = require(j, "density");
        model.density.start_density = require(density, "start").get<double>();
        model.density.end_density = require(density, "end").get<double>();
        model.density.duration = require(density, "duration").get<std::int64_t>();

        model.seed = require(j, "seed").get<std::uint64_t>();
        if (j.contains("gate")) model.gate = j["gate"].get<std::int64_t>();
        if (j.contains("early_part")) model.early_part = j["early_part"].get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw io_error(std::string("load_model: schema violation: ") + e.what());
    }

    if (model.frame_gains.size() != model.gain_times.size())
        throw io_error("load_model: frame_gains/gain_times length mismatch");
    if (model.prob_matrix.cols != model.prob_times.size())
        throw io_error("load_model: prob_matrix/prob_times length mismatch");
    return model;
}

}  // namespace dvn
