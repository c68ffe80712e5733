#include "rfmix/config.hpp"

#include "rfmix/error.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace rfmix {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Line tracking. The parser reads through TrackingIterator, which remembers
// the line of the last non-blank character consumed; a SAX pass over the
// same text records that line for every key and value path.

struct LineState {
    std::size_t line = 1;
    std::size_t token_line = 1;
};

class TrackingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    TrackingIterator(const char* p, LineState* s) : p_(p), s_(s) {}

    reference operator*() const { return *p_; }
    TrackingIterator& operator++()
    {
        const char c = *p_;
        if (c == '\n') {
            ++s_->line;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            s_->token_line = s_->line;
        }
        ++p_;
        return *this;
    }
    TrackingIterator operator++(int)
    {
        auto old = *this;
        ++*this;
        return old;
    }
    bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }
    bool operator!=(const TrackingIterator& o) const { return p_ != o.p_; }

private:
    const char* p_;
    LineState* s_;
};

using LineMap = std::map<std::string, std::size_t>;

std::string child_path(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i)
{
    return parent + "[" + std::to_string(i) + "]";
}

class LineRecorder : public nlohmann::json_sax<Json> {
public:
    LineRecorder(const LineState& s, LineMap& out) : s_(s), out_(out) {}

    bool null() override { return value(); }
    bool boolean(bool) override { return value(); }
    bool number_integer(number_integer_t) override { return value(); }
    bool number_unsigned(number_unsigned_t) override { return value(); }
    bool number_float(number_float_t, const string_t&) override { return value(); }
    bool string(string_t&) override { return value(); }
    bool binary(binary_t&) override { return value(); }
    bool start_object(std::size_t) override { return open(false); }
    bool end_object() override { return close(); }
    bool start_array(std::size_t) override { return open(true); }
    bool end_array() override { return close(); }
    bool key(string_t& k) override
    {
        frames_.back().key = k;
        out_.emplace(current(), s_.token_line);
        return true;
    }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

private:
    struct Frame {
        std::string path;
        bool array = false;
        std::size_t index = 0;
        std::string key;
    };

    std::string current() const
    {
        if (frames_.empty()) {
            return "";
        }
        const Frame& f = frames_.back();
        return f.array ? index_path(f.path, f.index) : child_path(f.path, f.key);
    }

    void advance()
    {
        if (!frames_.empty() && frames_.back().array) {
            ++frames_.back().index;
        }
    }

    bool value()
    {
        out_.emplace(current(), s_.token_line);
        advance();
        return true;
    }

    bool open(bool array)
    {
        const std::string path = current();
        out_.emplace(path, s_.token_line);
        advance();
        frames_.push_back({path, array, 0, {}});
        return true;
    }

    bool close()
    {
        frames_.pop_back();
        return true;
    }

    const LineState& s_;
    LineMap& out_;
    std::vector<Frame> frames_;
};

struct ParsedText {
    Json json;
    LineMap lines;
};

ParsedText parse_json_text(const std::string& text, const std::string& source)
{
    ParsedText out;
    try {
        out.json = Json::parse(text);
    } catch (const Json::parse_error& e) {
        // e.what() carries nlohmann's own "line L, column C" position.
        throw ValidationError(source + ": invalid JSON: " + e.what());
    }
    LineState state;
    LineRecorder rec(state, out.lines);
    const char* begin = text.data();
    Json::sax_parse(TrackingIterator(begin, &state), TrackingIterator(begin + text.size(), &state), &rec);
    return out;
}

// ---------------------------------------------------------------------------
// Typed access with located errors.

class Node {
public:
    Node(const Json& j, std::string path, const LineMap& lines, const std::string& source)
        : j_(&j), path_(std::move(path)), lines_(&lines), source_(&source)
    {
    }

    const std::string& path() const { return path_; }
    const Json& json() const { return *j_; }

    [[noreturn]] void fail(const std::string& msg) const
    {
        std::string label = path_.empty() ? std::string("(root)") : path_;
        throw ValidationError(*source_ + ":" + std::to_string(line()) + ": " + label + ": " + msg);
    }

    std::size_t line() const
    {
        std::string p = path_;
        for (;;) {
            if (auto it = lines_->find(p); it != lines_->end()) {
                return it->second;
            }
            const auto cut = p.find_last_of(".[");
            if (cut == std::string::npos) {
                return 1;
            }
            p.resize(cut);
        }
    }

    // Re-throws a module validation failure at this node.
    template <typename F>
    void check(F&& f) const
    {
        try {
            f();
        } catch (const ValidationError& e) {
            fail(e.what());
        }
    }

    void expect_object() const
    {
        if (!j_->is_object()) {
            fail("expected an object");
        }
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        expect_object();
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_->items()) {
            if (!ok.count(k) && k != "notes") {
                at(k).fail("unknown key");
            }
        }
    }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const
    {
        expect_object();
        if (!j_->contains(key)) {
            fail("missing key '" + key + "'");
        }
        return {(*j_)[key], child_path(path_, key), *lines_, *source_};
    }

    std::optional<Node> get(const std::string& key) const
    {
        if (!has(key)) {
            return std::nullopt;
        }
        return at(key);
    }

    Node index(std::size_t i) const { return {(*j_)[i], index_path(path_, i), *lines_, *source_}; }

    double number() const
    {
        if (j_->is_string()) {
            const auto s = j_->get<std::string>();
            if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
        }
        if (!j_->is_number()) {
            fail("expected a number");
        }
        return j_->get<double>();
    }

    double finite() const
    {
        const double v = number();
        if (!std::isfinite(v)) {
            fail("must be finite");
        }
        return v;
    }

    long long integer() const
    {
        if (!j_->is_number_integer()) {
            fail("expected an integer");
        }
        return j_->get<long long>();
    }

    std::uint64_t unsigned_integer() const
    {
        if (!j_->is_number_unsigned()) {
            fail("expected a non-negative integer");
        }
        return j_->get<std::uint64_t>();
    }

    bool boolean() const
    {
        if (!j_->is_boolean()) {
            fail("expected true or false");
        }
        return j_->get<bool>();
    }

    std::string text() const
    {
        if (!j_->is_string()) {
            fail("expected a string");
        }
        return j_->get<std::string>();
    }

    std::vector<double> reals(std::size_t n) const
    {
        if (!j_->is_array() || j_->size() != n) {
            fail("expected an array of " + std::to_string(n) + " numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(index(i).finite());
        }
        return out;
    }

    cplx complex() const
    {
        const auto v = reals(2);
        return {v[0], v[1]};
    }

    double number_or(const std::string& key, double def) const { return has(key) ? at(key).finite() : def; }

private:
    const Json* j_;
    std::string path_;
    const LineMap* lines_;
    const std::string* source_;
};

int checked_int(const Node& n, long long lo, long long hi)
{
    const long long v = n.integer();
    if (v < lo || v > hi) {
        n.fail("must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
}

BlockParams parse_block(const Node& n, std::string& label)
{
    n.expect_object();
    const std::string type = n.at("type").text();
    label = n.has("label") ? n.at("label").text() : type;
    if (type == "amp") {
        n.allow({"type", "label", "gain_db", "nf_db", "p1db_in_dbm", "iip3_dbm"});
        AmpParams a;
        a.gain_db = n.at("gain_db").finite();
        a.nf_db = n.number_or("nf_db", 0.0);
        a.p1db_in_dbm = n.at("p1db_in_dbm").finite();
        a.iip3_dbm = n.at("iip3_dbm").number();
        n.check([&] { validate(a); });
        return a;
    }
    if (type == "atten") {
        n.allow({"type", "label", "attenuation_db"});
        AttenParams a{n.at("attenuation_db").finite()};
        n.check([&] { validate(a); });
        return a;
    }
    if (type == "mixer") {
        n.allow({"type", "label", "mu", "nu", "leak", "gain", "phase_deg", "conv_loss_db"});
        const cplx leak = n.has("leak") ? n.at("leak").complex() : cplx{};
        MixerParams m;
        if (n.has("mu")) {
            if (n.has("gain") || n.has("phase_deg") || n.has("conv_loss_db")) {
                n.fail("give either mu/nu or gain/phase_deg/conv_loss_db, not both");
            }
            m.mu = n.at("mu").complex();
            m.nu = n.has("nu") ? n.at("nu").complex() : cplx{};
            m.leak = leak;
        } else {
            if (n.has("nu")) {
                n.at("nu").fail("nu requires mu");
            }
            const double g = n.number_or("gain", 1.0);
            const double phi = n.number_or("phase_deg", 0.0) * kPi / 180.0;
            const double loss = n.at("conv_loss_db").finite();
            n.check([&] { m = MixerParams::from_gain_phase(g, phi, loss, leak); });
        }
        n.check([&] { validate(m); });
        return m;
    }
    if (type == "lowpass") {
        n.allow({"type", "label", "cutoff_hz", "taps"});
        FilterParams f;
        f.cutoff = n.at("cutoff_hz").finite();
        f.taps = checked_int(n.at("taps"), 1, 100001);
        return f; // checked against the sample rate with the chain
    }
    n.at("type").fail("unknown block type '" + type + "' (amp, atten, mixer, lowpass)");
}

NamedChain parse_chain(const Node& n, const std::string& name, double fs)
{
    n.allow({"role", "lo_drive_dbm", "input_dbm", "blocks"});
    NamedChain c;
    c.name = name;
    const Node role = n.at("role");
    const auto r = parse_role(role.text());
    if (!r) {
        role.fail("role must be UPH, UPL or DN");
    }
    c.spec.role = *r;
    c.spec.lo_drive_dbm = n.number_or("lo_drive_dbm", 13.0);
    c.input_dbm = n.number_or("input_dbm", -30.0);
    const Node blocks = n.at("blocks");
    if (!blocks.json().is_array()) {
        blocks.fail("expected an array of blocks");
    }
    for (std::size_t i = 0; i < blocks.json().size(); ++i) {
        const Node b = blocks.index(i);
        Stage s;
        s.params = parse_block(b, s.label);
        if (const auto* f = std::get_if<FilterParams>(&s.params)) {
            b.check([&] { validate(*f, fs); });
        }
        c.spec.stages.push_back(std::move(s));
    }
    blocks.check([&] { validate(c.spec, fs); });
    return c;
}

QuantizerSpec parse_quantizer(const Node& n, QuantizerSpec q)
{
    n.allow({"bits", "full_scale"});
    if (n.has("bits")) q.bits = checked_int(n.at("bits"), 2, 30);
    q.full_scale = n.number_or("full_scale", q.full_scale);
    n.check([&] { validate(q); });
    return q;
}

Predistorter parse_matrix(const Node& n)
{
    if (!n.json().is_array() || n.json().size() != 2) {
        n.fail("expected a 2x2 matrix [[m00, m01], [m10, m11]]");
    }
    Predistorter::Matrix m{};
    for (std::size_t r = 0; r < 2; ++r) {
        const auto row = n.index(r).reals(2);
        m[r][0] = row[0];
        m[r][1] = row[1];
    }
    Predistorter p = Predistorter::from_matrix(m);
    n.check([&] { validate(p); });
    return p;
}

BiasSetting parse_bias(const Node& n)
{
    const auto v = n.reals(2);
    return {v[0], v[1]};
}

Settings parse_settings_node(const Node& root)
{
    root.expect_object();
    Settings s;
    const Node bias = root.at("bias");
    bias.allow({"b_i", "b_q"});
    s.bias = {bias.at("b_i").finite(), bias.at("b_q").finite()};
    const Node pd = root.at("predistorter");
    pd.expect_object();
    s.predistorter = parse_matrix(pd.at("matrix"));
    return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

const NamedChain* find_chain(const std::vector<NamedChain>& chains, const std::string& name)
{
    for (const auto& c : chains) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

} // namespace

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad()) {
        throw IoError("read from '" + path.string() + "' failed");
    }
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    os << text;
    os.flush();
    if (!os) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

const NamedChain& BenchConfig::chain(const std::string& name) const
{
    const NamedChain* c = find_chain(chains, name);
    require(c != nullptr, "config: no chain named '" + name + "'");
    return *c;
}

UpConverter BenchConfig::loopback_up() const
{
    require(loopback.has_value(), "config: no loopback section");
    return {chain(loopback->up).spec, loopback->bias, loopback->predistorter};
}

const ChainSpec& BenchConfig::loopback_dn() const
{
    require(loopback.has_value(), "config: no loopback section");
    return chain(loopback->dn).spec;
}

UpConverter BenchConfig::calibration_target() const
{
    std::string name;
    if (calibrate_up) {
        name = *calibrate_up;
    } else if (loopback) {
        name = loopback->up;
    } else {
        for (const auto& c : chains) {
            if (is_up(c.spec.role)) {
                require(name.empty(), "config: several UP chains; set calibrate.up");
                name = c.name;
            }
        }
        require(!name.empty(), "config: no UP chain to calibrate");
    }
    UpConverter up{chain(name).spec, {}, {}};
    if (loopback && loopback->up == name) {
        up.bias = loopback->bias;
        up.predistorter = loopback->predistorter;
    }
    return up;
}

BenchConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir)
{
    const ParsedText parsed = parse_json_text(text, source);
    const Node root(parsed.json, "", parsed.lines, source);
    root.allow({"chains", "loopback", "probe", "optimizer", "calibrate", "outputs"});

    BenchConfig cfg;
    cfg.source = source;

    // The loopback sample rate also governs filter validation.
    LoopbackConfig lb;
    const auto lb_node = root.get("loopback");
    if (lb_node) {
        lb_node->expect_object();
        lb.sample_rate = lb_node->number_or("sample_rate_hz", lb.sample_rate);
    }

    const Node chains = root.at("chains");
    chains.expect_object();
    if (chains.json().empty()) {
        chains.fail("no chains declared");
    }
    for (const auto& [name, value] : chains.json().items()) {
        cfg.chains.push_back(parse_chain(chains.at(name), name, lb.sample_rate));
    }

    if (const auto p = root.get("probe")) {
        p->allow({"sample_rate_hz", "if_freq_hz", "amplitude", "n_samples", "lo_freq_hz"});
        ProbeConfig& pr = cfg.probe;
        pr.sample_rate = p->number_or("sample_rate_hz", pr.sample_rate);
        pr.if_freq = p->number_or("if_freq_hz", pr.if_freq);
        pr.amplitude = p->number_or("amplitude", pr.amplitude);
        if (p->has("n_samples")) pr.n_samples = static_cast<std::size_t>(checked_int(p->at("n_samples"), 1, 1 << 26));
        pr.lo_freq = p->number_or("lo_freq_hz", pr.lo_freq);
        p->check([&] { validate(pr); });
    }

    if (const auto o = root.get("optimizer")) {
        o->allow({"max_evals", "init_step", "tol_dbc", "seed", "bias_range"});
        OptimizerConfig& op = cfg.optimizer;
        if (o->has("max_evals")) op.max_evals = checked_int(o->at("max_evals"), 1, 10'000'000);
        op.init_step = o->number_or("init_step", op.init_step);
        op.tol_dbc = o->number_or("tol_dbc", op.tol_dbc);
        if (o->has("seed")) op.seed = o->at("seed").unsigned_integer();
        op.bias_range = o->number_or("bias_range", op.bias_range);
        o->check([&] { validate(op); });
    }

    if (lb_node) {
        const Node& n = *lb_node;
        n.allow({"up", "dn", "if_freq_hz", "lo_freq_hz", "sample_rate_hz", "dac", "adc", "quantize", "drive_amplitude",
                 "accum_len", "rf_path_atten_db", "n_phase_points", "noise", "seed", "bias", "predistorter",
                 "settings_file"});
        LoopbackSection sec;
        sec.up = n.at("up").text();
        sec.dn = n.at("dn").text();
        const NamedChain* up = find_chain(cfg.chains, sec.up);
        const NamedChain* dn = find_chain(cfg.chains, sec.dn);
        if (!up) n.at("up").fail("no chain named '" + sec.up + "'");
        if (!dn) n.at("dn").fail("no chain named '" + sec.dn + "'");
        if (!is_up(up->spec.role)) n.at("up").fail("chain '" + sec.up + "' is not UPH or UPL");
        if (dn->spec.role != ChainRole::DN) n.at("dn").fail("chain '" + sec.dn + "' is not DN");

        lb.if_freq = n.number_or("if_freq_hz", lb.if_freq);
        lb.lo_freq = n.number_or("lo_freq_hz", lb.lo_freq);
        if (const auto q = n.get("dac")) lb.dac = parse_quantizer(*q, lb.dac);
        if (const auto q = n.get("adc")) lb.adc = parse_quantizer(*q, lb.adc);
        if (const auto q = n.get("quantize")) lb.quantize = q->boolean();
        lb.drive_amplitude = n.number_or("drive_amplitude", lb.drive_amplitude);
        if (n.has("accum_len")) lb.accum_len = static_cast<std::size_t>(checked_int(n.at("accum_len"), 1, 1 << 26));
        lb.rf_path_atten_db = n.number_or("rf_path_atten_db", lb.rf_path_atten_db);
        if (n.has("n_phase_points")) {
            lb.n_phase_points = static_cast<std::size_t>(checked_int(n.at("n_phase_points"), 1, 1 << 20));
        }
        if (const auto q = n.get("noise")) lb.noise_on = q->boolean();
        if (const auto q = n.get("seed")) lb.seed = q->unsigned_integer();
        n.check([&] { validate(lb); });
        sec.config = lb;

        if (const auto s = n.get("settings_file")) {
            if (n.has("bias") || n.has("predistorter")) {
                s->fail("settings_file excludes inline bias / predistorter");
            }
            const auto path = resolve(base_dir, s->text());
            Settings st;
            try {
                st = load_settings(path);
            } catch (const ValidationError& e) {
                s->fail(e.what());
            }
            sec.bias = st.bias;
            sec.predistorter = st.predistorter;
        } else {
            if (const auto b = n.get("bias")) sec.bias = parse_bias(*b);
            if (const auto p = n.get("predistorter")) sec.predistorter = parse_matrix(*p);
        }
        const double range = cfg.optimizer.bias_range;
        n.check([&] { validate(sec.bias, range); });
        cfg.loopback = sec;
    }

    if (const auto c = root.get("calibrate")) {
        c->allow({"up"});
        const Node up = c->at("up");
        const NamedChain* ch = find_chain(cfg.chains, up.text());
        if (!ch) up.fail("no chain named '" + up.text() + "'");
        if (!is_up(ch->spec.role)) up.fail("chain '" + up.text() + "' is not UPH or UPL");
        cfg.calibrate_up = up.text();
    }

    if (const auto o = root.get("outputs")) {
        o->allow({"budget_report", "scan_csv", "scan_report", "settings", "rb_report"});
        OutputPaths& out = cfg.outputs;
        if (o->has("budget_report")) out.budget_report = o->at("budget_report").text();
        if (o->has("scan_csv")) out.scan_csv = o->at("scan_csv").text();
        if (o->has("scan_report")) out.scan_report = o->at("scan_report").text();
        if (o->has("settings")) out.settings = o->at("settings").text();
        if (o->has("rb_report")) out.rb_report = o->at("rb_report").text();
    }
    return cfg;
}

BenchConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_text_file(path), path.string(), path.parent_path());
}

Settings parse_settings(const std::string& text, const std::string& source)
{
    const ParsedText parsed = parse_json_text(text, source);
    return parse_settings_node(Node(parsed.json, "", parsed.lines, source));
}

Settings load_settings(const std::filesystem::path& path)
{
    return parse_settings(read_text_file(path), path.string());
}

} // namespace rfmix
