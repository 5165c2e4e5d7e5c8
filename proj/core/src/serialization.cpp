#include "lemsched/serialization.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lemsched/error.hpp"

namespace lemsched {

using nlohmann::json;

namespace {

json points_to_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

std::vector<Point> points_from_json(const json& arr) {
    std::vector<Point> pts;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("layout record: point must be [x, y]");
        pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return pts;
}

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string layout_to_jsonl(const Layout& layout) {
    json j;
    j["index"] = layout.index;
    j["field_length"] = layout.config.field_length;
    j["K"] = layout.pair_count();
    j["tx"] = points_to_json(layout.tx);
    j["rx"] = points_to_json(layout.rx);
    return j.dump();
}

Layout layout_from_jsonl(std::string_view line, const SimConfig& base) {
    const json j = parse_json(line, "layout record");
    try {
        Layout l;
        l.config = base;
        l.config.field_length = j.at("field_length").get<double>();
        l.config.K = j.at("K").get<std::size_t>();
        l.index = j.at("index").get<std::size_t>();
        l.tx = points_from_json(j.at("tx"));
        l.rx = points_from_json(j.at("rx"));
        l.validate();
        return l;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("layout record: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

void write_layouts(const std::filesystem::path& path, const std::vector<Layout>& layouts) {
    std::string text;
    for (const auto& l : layouts) text += layout_to_jsonl(l) + "\n";
    write_text_file(path, text);
}

std::vector<Layout> read_layouts(const std::filesystem::path& path, const SimConfig& base) {
    std::istringstream in(read_text_file(path));
    std::vector<Layout> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(layout_from_jsonl(line, base));
    return out;
}

std::string to_string(KernelExponent e) {
    return e == KernelExponent::squared_norm ? "squared_norm" : "literal_fourth_power";
}

KernelExponent kernel_exponent_from_string(const std::string& s) {
    if (s == "squared_norm") return KernelExponent::squared_norm;
    if (s == "literal_fourth_power") return KernelExponent::literal_fourth_power;
    throw ValidationError("unknown kernel exponent '" + s + "'");
}

std::string model_to_string(const SvmModel& model) {
    const SvmHyper& hp = model.hyper();
    json j;
    j["schema"] = "lemsched.svm_model";
    j["schema_version"] = kModelSchemaVersion;
    j["hyper"] = {{"C", hp.C},
                  {"tol", hp.tol},
                  {"max_iterations", hp.max_iterations},
                  {"balance_classes", hp.balance_classes},
                  {"kernel", {{"gamma_kernel", hp.kernel.gamma_kernel}, {"exponent", to_string(hp.kernel.exponent)}}}};
    j["c_positive"] = model.c_positive();
    j["c_negative"] = model.c_negative();
    j["converged"] = model.converged();
    j["iterations"] = model.iterations();
    j["bias"] = model.bias();
    j["dim"] = model.is_constant() ? 0 : model.support_points().front().dim();
    json sps = json::array();
    for (const auto& s : model.support_points()) {
        const auto d = s.matrix().data();
        sps.push_back(std::vector<double>(d.begin(), d.end()));
    }
    j["support_points"] = std::move(sps);
    j["dual_coeffs"] = model.dual_coeffs();
    return j.dump(1) + "\n";
}

SvmModel model_from_string(std::string_view text) {
    const json j = parse_json(text, "model file");
    try {
        if (j.at("schema").get<std::string>() != "lemsched.svm_model")
            throw ValidationError("model file: unexpected schema");
        if (j.at("schema_version").get<int>() != kModelSchemaVersion)
            throw ValidationError("model file: unsupported schema version");
        const json& h = j.at("hyper");
        SvmHyper hp;
        hp.C = h.at("C").get<double>();
        hp.tol = h.at("tol").get<double>();
        hp.max_iterations = h.at("max_iterations").get<std::size_t>();
        hp.balance_classes = h.at("balance_classes").get<bool>();
        hp.kernel.gamma_kernel = h.at("kernel").at("gamma_kernel").get<double>();
        hp.kernel.exponent = kernel_exponent_from_string(h.at("kernel").at("exponent").get<std::string>());

        const auto dim = j.at("dim").get<std::size_t>();
        std::vector<SpdMatrix> support;
        for (const auto& flat : j.at("support_points")) {
            const auto values = flat.get<std::vector<double>>();
            if (values.size() != dim * dim) throw ValidationError("model file: support point has wrong size");
            Matrix m(dim, dim);
            std::copy(values.begin(), values.end(), m.data().begin());
            support.emplace_back(std::move(m));
        }
        return SvmModel(std::move(support), j.at("dual_coeffs").get<std::vector<double>>(), j.at("bias").get<double>(),
                        hp, j.at("c_positive").get<double>(), j.at("c_negative").get<double>(),
                        j.at("converged").get<bool>(), j.at("iterations").get<std::size_t>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model file: ") + e.what());
    }
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    write_text_file(path, model_to_string(model));
}

SvmModel load_model(const std::filesystem::path& path) { return model_from_string(read_text_file(path)); }

}  // namespace lemsched
