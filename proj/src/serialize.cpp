#include "wrisk/serialize.hpp"

#include "wrisk/error.hpp"
#include "wrisk/text_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace wrisk {
namespace {

const std::string kMagic = "wrisk-model";

void write_values(std::ostream& out, const std::string& key, std::span<const double> values) {
    out << key;
    for (double v : values) {
        out << ' ' << format_double(v);
    }
    out << '\n';
}

void write_scaler(std::ostream& out, const Scaler& s) {
    write_values(out, "feature_mean", s.feature_mean);
    write_values(out, "feature_std", s.feature_std);
    out << "feature_constant";
    for (bool c : s.feature_constant) {
        out << ' ' << (c ? 1 : 0);
    }
    out << '\n';
    out << "target " << format_double(s.target_mean) << ' ' << format_double(s.target_std) << ' '
        << (s.target_constant ? 1 : 0) << '\n';
}

void write_header(std::ostream& out, const std::string& type) {
    out << kMagic << ' ' << kModelFormatVersion << ' ' << type << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::vector<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!trim(line).empty()) {
                std::istringstream words(line);
                std::vector<std::string> tokens;
                for (std::string w; words >> w;) {
                    tokens.push_back(w);
                }
                return tokens;
            }
        }
        fail("unexpected end of model file");
    }

    std::vector<std::string> expect(const std::string& key, std::size_t values) {
        auto tokens = next();
        if (tokens.front() != key || tokens.size() != values + 1) {
            fail("expected '" + key + "' with " + std::to_string(values) + " value(s)");
        }
        return tokens;
    }

    double number(const std::string& token) {
        auto v = parse_double(token);
        if (!v) {
            fail("malformed number '" + token + "'");
        }
        return *v;
    }

    std::size_t count(const std::string& token) {
        const double v = number(token);
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            fail("malformed count '" + token + "'");
        }
        return static_cast<std::size_t>(v);
    }

    std::vector<double> values(const std::string& key, std::size_t n) {
        auto tokens = expect(key, n);
        std::vector<double> out;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            out.push_back(number(tokens[i]));
        }
        return out;
    }

    double scalar(const std::string& key) { return values(key, 1).front(); }

    void header(const std::string& type) {
        auto tokens = next();
        if (tokens.size() != 3 || tokens[0] != kMagic) {
            throw ModelVersionError("not a model file (line " + std::to_string(line_) + ")");
        }
        if (tokens[1] != std::to_string(kModelFormatVersion)) {
            throw ModelVersionError("unsupported model format version " + tokens[1] + " (this build reads " +
                                    std::to_string(kModelFormatVersion) + ")");
        }
        if (tokens[2] != type) {
            throw ModelVersionError("expected a '" + type + "' record, found '" + tokens[2] + "'");
        }
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw DataError("model file line " + std::to_string(line_) + ": " + message);
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

Scaler read_scaler(Reader& r, std::size_t dim) {
    Scaler s;
    s.feature_mean = r.values("feature_mean", dim);
    s.feature_std = r.values("feature_std", dim);
    for (double c : r.values("feature_constant", dim)) {
        s.feature_constant.push_back(c != 0.0);
    }
    const auto t = r.values("target", 3);
    s.target_mean = t[0];
    s.target_std = t[1];
    s.target_constant = t[2] != 0.0;
    return s;
}

SvrModel read_svr_body(Reader& r) {
    SvrModel m;
    const std::size_t dim = r.count(r.expect("dimension", 1)[1]);
    auto kernel = r.next();
    if (kernel.size() == 3 && kernel[0] == "kernel" && kernel[1] == "rbf") {
        m.hyperparams.kernel = KernelSpec::rbf(r.number(kernel[2]));
    } else if (kernel.size() == 2 && kernel[0] == "kernel" && kernel[1] == "linear") {
        m.hyperparams.kernel = KernelSpec::linear();
    } else {
        r.fail("expected 'kernel rbf <sigma2>' or 'kernel linear'");
    }
    m.hyperparams.C = r.scalar("C");
    m.hyperparams.epsilon = r.scalar("epsilon");
    m.bias = r.scalar("bias");
    m.scaler = read_scaler(r, dim);
    const std::size_t count = r.count(r.expect("support", 1)[1]);
    m.support = Matrix(0, dim);
    for (std::size_t i = 0; i < count; ++i) {
        const auto row = r.values("sv", dim + 1);
        m.theta.push_back(row[0]);
        m.support.append_row(std::span<const double>(row).subspan(1));
    }
    r.expect("end", 0);
    return m;
}

AnnModel read_ann_body(Reader& r) {
    AnnModel m;
    const std::size_t inputs = r.count(r.expect("inputs", 1)[1]);
    const std::size_t hidden = r.count(r.expect("hidden", 1)[1]);
    m.scaler = read_scaler(r, inputs);
    m.weights = AnnWeights::zeros(inputs, hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        const auto row = r.values("hidden_weights", inputs);
        for (std::size_t i = 0; i < inputs; ++i) {
            m.weights.hidden_weights(j, i) = row[i];
        }
    }
    m.weights.hidden_bias = r.values("hidden_bias", hidden);
    m.weights.output_weights = r.values("output_weights", hidden);
    m.weights.output_bias = r.scalar("output_bias");
    r.expect("end", 0);
    return m;
}

void write_stage(std::ostream& out, const std::string& name, const Regressor& model, const StageProvenance& p) {
    out << "stage " << name << '\n';
    out << "training_rmse " << format_double(p.training_rmse) << '\n';
    out << "evaluations " << p.evaluations << '\n';
    if (p.hyperparams) {
        out << "hyperparams " << format_double(p.hyperparams->C) << ' '
            << format_double(p.hyperparams->kernel.sigma2) << ' ' << format_double(p.hyperparams->epsilon) << '\n';
    } else {
        out << "hyperparams none\n";
    }
    std::visit([&](const auto& m) { write_model(out, m); }, model);
}

Regressor read_stage(Reader& r, const std::string& name, StageProvenance& p) {
    r.expect("stage", 1);
    p.training_rmse = r.scalar("training_rmse");
    p.evaluations = r.count(r.expect("evaluations", 1)[1]);
    auto hp = r.next();
    if (hp.size() == 4 && hp[0] == "hyperparams") {
        SvrHyperparams h;
        h.C = r.number(hp[1]);
        h.kernel = KernelSpec::rbf(r.number(hp[2]));
        h.epsilon = r.number(hp[3]);
        p.hyperparams = h;
    } else if (!(hp.size() == 2 && hp[0] == "hyperparams" && hp[1] == "none")) {
        r.fail("malformed hyperparams line for stage " + name);
    }
    auto header = r.next();
    if (header.size() != 3 || header[0] != kMagic || header[1] != std::to_string(kModelFormatVersion)) {
        throw ModelVersionError("unsupported embedded model record in stage " + name);
    }
    if (header[2] == "svr") {
        SvrModel m = read_svr_body(r);
        if (p.hyperparams) {
            p.hyperparams->kernel = m.hyperparams.kernel;
        }
        return m;
    }
    if (header[2] == "ann") {
        return read_ann_body(r);
    }
    throw ModelVersionError("unknown embedded model type '" + header[2] + "'");
}

} // namespace

void write_model(std::ostream& out, const SvrModel& model) {
    write_header(out, "svr");
    out << "dimension " << model.dimension() << '\n';
    if (model.hyperparams.kernel.kind == KernelSpec::Kind::Rbf) {
        out << "kernel rbf " << format_double(model.hyperparams.kernel.sigma2) << '\n';
    } else {
        out << "kernel linear\n";
    }
    out << "C " << format_double(model.hyperparams.C) << '\n';
    out << "epsilon " << format_double(model.hyperparams.epsilon) << '\n';
    out << "bias " << format_double(model.bias) << '\n';
    write_scaler(out, model.scaler);
    out << "support " << model.theta.size() << '\n';
    for (std::size_t i = 0; i < model.theta.size(); ++i) {
        out << "sv " << format_double(model.theta[i]);
        for (double v : model.support.row(i)) {
            out << ' ' << format_double(v);
        }
        out << '\n';
    }
    out << "end\n";
}

void write_model(std::ostream& out, const AnnModel& model) {
    write_header(out, "ann");
    out << "inputs " << model.weights.inputs() << '\n';
    out << "hidden " << model.weights.hidden() << '\n';
    write_scaler(out, model.scaler);
    for (std::size_t j = 0; j < model.weights.hidden(); ++j) {
        write_values(out, "hidden_weights", model.weights.hidden_weights.row(j));
    }
    write_values(out, "hidden_bias", model.weights.hidden_bias);
    write_values(out, "output_weights", model.weights.output_weights);
    out << "output_bias " << format_double(model.weights.output_bias) << '\n';
    out << "end\n";
}

void write_model(std::ostream& out, const TwoStageModel& model) {
    write_header(out, "two-stage");
    out << "kind " << to_string(model.kind) << '\n';
    const auto& c = model.control;
    out << "control " << format_double(c.claims_sum) << ' ' << format_double(c.loss_sum) << ' ' << c.weeks << ' '
        << c.first_year << ' ' << c.last_year << '\n';
    write_stage(out, "claims", model.claims_model, model.claims_provenance);
    write_stage(out, "loss", model.loss_model, model.loss_provenance);
    out << "end\n";
}

SvrModel read_svr_model(std::istream& in) {
    Reader r(in);
    r.header("svr");
    return read_svr_body(r);
}

AnnModel read_ann_model(std::istream& in) {
    Reader r(in);
    r.header("ann");
    return read_ann_body(r);
}

TwoStageModel read_two_stage_model(std::istream& in) {
    Reader r(in);
    r.header("two-stage");
    TwoStageModel m;
    try {
        m.kind = parse_model_kind(r.expect("kind", 1)[1]);
    } catch (const ConfigError& e) {
        r.fail(e.what());
    }
    const auto c = r.expect("control", 5);
    m.control.claims_sum = r.number(c[1]);
    m.control.loss_sum = r.number(c[2]);
    m.control.weeks = r.count(c[3]);
    m.control.first_year = static_cast<int>(r.number(c[4]));
    m.control.last_year = static_cast<int>(r.number(c[5]));
    m.claims_model = read_stage(r, "claims", m.claims_provenance);
    m.loss_model = read_stage(r, "loss", m.loss_provenance);
    r.expect("end", 0);
    if (input_dimension(m.loss_model) != input_dimension(m.claims_model) + 1) {
        r.fail("loss model must take one more input than the claims model");
    }
    return m;
}

std::string to_text(const TwoStageModel& model) {
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

TwoStageModel two_stage_from_text(const std::string& text) {
    std::istringstream in(text);
    return read_two_stage_model(in);
}

} // namespace wrisk
