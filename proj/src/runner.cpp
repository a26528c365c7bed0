#include "retfield/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace retfield {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v)
{
    if (v == 0.0)
        v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void put_vec(std::string& line, const Vec3& v)
{
    for (int i = 0; i < 3; ++i) {
        line += ',';
        line += format_double(v[i]);
    }
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson front_json(const FrontCheck& fc)
{
    return {{"pass", fc.magnitude_pass},
            {"max_precursor_magnitude", fc.max_precursor_magnitude},
            {"peak_magnitude", fc.peak_magnitude},
            {"component_pass", fc.pass},
            {"max_precursor_component", fc.max_precursor},
            {"peak_component", fc.global_peak}};
}

class Run {
public:
    Run(const RunConfig& cfg, const RunOptions& opts)
        : cfg_(cfg), threads_(opts.threads), src_(cfg.source_model()),
          dir_(opts.output_dir ? fs::path(*opts.output_dir) : fs::path(cfg.output.directory))
    {
    }

    RunReport execute()
    {
        RunReport out;
        out.output_dir = dir_;
        fs::create_directories(dir_);

        ojson& rep = out.report;
        rep["config"] = to_json(cfg_);
        rep["tasks"] = ojson::array();
        out.timings = {{"tasks", ojson::array()}};

        for (Task task : cfg_.tasks) {
            ojson entry = {{"task", to_string(task)}, {"status", "ok"}};
            const auto t0 = std::chrono::steady_clock::now();
            try {
                run_task(task, entry, rep);
            } catch (const std::exception& e) {
                entry["status"] = "error";
                entry["error"] = std::string(to_string(task)) + ": " + e.what();
                out.any_error = true;
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.timings["tasks"].push_back({{"task", to_string(task)}, {"seconds", secs}});
            rep["tasks"].push_back(std::move(entry));
        }

        if (cfg_.output.json) {
            artifacts_.push_back("timings.json");
            artifacts_.push_back("report.json");
        }
        rep["artifacts"] = artifacts_;
        if (cfg_.output.json) {
            write_file(dir_ / "timings.json", out.timings.dump(2) + "\n");
            write_file(dir_ / "report.json", rep.dump(2) + "\n");
        }
        return out;
    }

private:
    const RefinedFieldEvaluator& evaluator()
    {
        if (!evaluator_)
            evaluator_ = std::make_unique<RefinedFieldEvaluator>(src_, cfg_.constants, cfg_.quadrature.base_order,
                                                                 cfg_.quadrature.max_order, cfg_.quadrature.tol);
        return *evaluator_;
    }

    PointEvaluator point_evaluator(Representation rep)
    {
        const RefinedFieldEvaluator& ev = evaluator();
        return [&ev, rep](const ObservationPoint& obs) { return ev.evaluate(rep, obs); };
    }

    /// Waveform series per representation, sampled once per run.
    const WaveformSeries& series(Representation rep, ojson& entry)
    {
        auto it = series_.find(rep);
        if (it == series_.end()) {
            it = series_
                     .emplace(rep, sample_waveforms(point_evaluator(rep), rep, cfg_.ray(), cfg_.radii(), cfg_.times(),
                                                    cfg_.observation.component, threads_))
                     .first;
            if (cfg_.output.csv) {
                const std::string name = "waveform_" + std::string(to_string(rep)) + ".csv";
                emit_waveform_csv(it->second, dir_ / name);
                artifacts_.push_back(name);
            }
        }
        if (cfg_.output.csv)
            entry["artifacts"].push_back("waveform_" + std::string(to_string(rep)) + ".csv");
        return it->second;
    }

    static ojson quadrature_summary(const WaveformSeries& s)
    {
        double err = 0.0;
        int order = 0;
        for (const auto& d : s.samples) {
            err = std::max(err, d.err_estimate);
            order = std::max(order, d.order);
        }
        return {{"max_err_estimate", err}, {"max_order", order}};
    }

    void run_task(Task task, ojson& entry, ojson& rep)
    {
        switch (task) {
        case Task::Decompose: {
            const WaveformSeries& s = series(cfg_.analysis.representation, entry);
            entry["representation"] = to_string(s.representation);
            entry["samples"] = s.samples.size();
            entry["quadrature"] = quadrature_summary(s);
            double peak = 0.0;
            std::array<double, 3> term_peak{};
            for (const auto& d : s.samples) {
                peak = std::max(peak, norm(d.total));
                for (int k = 0; k < 3; ++k)
                    term_peak[k] = std::max(term_peak[k], norm(d.terms[k]));
            }
            entry["peak_magnitude"] = peak;
            ojson terms;
            for (int k = 0; k < s.samples.front().term_count(); ++k)
                terms[std::string(s.samples.front().term_name(k))] = term_peak[k];
            entry["term_peak_magnitude"] = terms;
            break;
        }
        case Task::Compare: {
            const WaveformSeries& a = series(Representation::Budko, entry);
            const WaveformSeries& b = series(Representation::Jefimenko, entry);
            double max = 0.0, sum = 0.0, peak = 0.0, max_abs_diff = 0.0;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < a.samples.size(); ++i) {
                const double r = relative_residual(a.samples[i], b.samples[i]);
                sum += r;
                if (r > max) {
                    max = r;
                    arg = i;
                }
                peak = std::max(peak, norm(a.samples[i].total));
                max_abs_diff = std::max(max_abs_diff, norm(a.samples[i].total - b.samples[i].total));
            }
            const std::size_t nt = a.times.size();
            ojson summary = {{"max", max},
                             {"mean", sum / static_cast<double>(a.samples.size())},
                             {"max_at", {{"r", a.radii[arg / nt]}, {"t", a.times[arg % nt]}}},
                             {"max_abs_difference_over_peak", peak > 0.0 ? max_abs_diff / peak : 0.0},
                             {"boundary_leakage", boundary_leakage(src_)}};
            entry["residual_summary"] = summary;
            entry["quadrature"] = {{"budko", quadrature_summary(a)}, {"jefimenko", quadrature_summary(b)}};
            rep["residual_summary"] = summary;
            break;
        }
        case Task::FrontCheck: {
            ojson fc;
            bool pass = true;
            for (Representation r : {Representation::Budko, Representation::Jefimenko}) {
                const FrontCheck c = light_front_check(series(r, entry), src_, cfg_.constants);
                fc[std::string(to_string(r))] = front_json(c);
                pass = pass && c.magnitude_pass;
            }
            ojson summary = {{"pass", pass}};
            summary.update(fc);
            entry["front_check"] = summary;
            rep["front_check"] = summary;
            break;
        }
        case Task::Velocity: {
            const WaveformSeries& s = series(cfg_.analysis.representation, entry);
            const Window w = cfg_.analysis.window.value_or(Window{s.times.front(), s.times.back()});
            const auto picks = feature_arrival_times(s, cfg_.analysis.feature, w.lo, w.hi);
            ojson missing = ojson::array();
            for (const auto& p : picks)
                if (!p.found)
                    missing.push_back({{"r", p.radius}, {"reason", p.reason}});
            const VelocityProfile prof = local_velocity(picks, cfg_.analysis.feature);
            if (cfg_.output.csv) {
                write_file(dir_ / "velocity.csv", velocity_csv(prof));
                artifacts_.push_back("velocity.csv");
                entry["artifacts"].push_back("velocity.csv");
            }
            ojson negative = ojson::array();
            for (std::size_t i : prof.negative_segments())
                negative.push_back(
                    {{"r_lo", prof.radii[i]}, {"r_hi", prof.radii[i + 1]}, {"v", prof.local_velocity[i]}});
            const auto vmin = prof.min_velocity();
            ojson summary = {{"representation", to_string(s.representation)},
                             {"feature", to_string(prof.feature)},
                             {"window", {w.lo, w.hi}},
                             {"features_found", prof.radii.size()},
                             {"features_missing", missing},
                             {"min_velocity", vmin ? number_or_null(*vmin) : ojson(nullptr)},
                             {"negative_segments", negative},
                             {"front_check", front_json(light_front_check(s, src_, cfg_.constants))}};
            entry["velocity"] = summary;
            rep["velocity"] = summary;
            break;
        }
        case Task::Scaling: {
            const Representation r = cfg_.analysis.representation;
            const auto& o = cfg_.scaling.offsets;
            const RadialSweep sweep = sample_radial_sweep(point_evaluator(r), r, cfg_.ray(), cfg_.radii(),
                                                          TimeGrid{o.start, o.stop, o.count}.values(),
                                                          cfg_.constants.c, threads_);
            if (cfg_.output.csv) {
                std::string text = "r,offset,term1x,term1y,term1z,term2x,term2y,term2z,term3x,term3y,term3z\n";
                for (std::size_t i = 0; i < sweep.radii.size(); ++i)
                    for (std::size_t j = 0; j < sweep.offsets.size(); ++j) {
                        std::string line = format_double(sweep.radii[i]) + "," + format_double(sweep.offsets[j]);
                        for (const Vec3& t : sweep.at(i, j).terms)
                            put_vec(line, t);
                        text += line + "\n";
                    }
                write_file(dir_ / "scaling.csv", text);
                artifacts_.push_back("scaling.csv");
                entry["artifacts"].push_back("scaling.csv");
            }
            ojson fits;
            const std::optional<Window>* windows[] = {&cfg_.scaling.near, &cfg_.scaling.intermediate,
                                                      &cfg_.scaling.far};
            static constexpr const char* names[] = {"near", "intermediate", "far"};
            for (int k = 0; k < 3; ++k) {
                if (!*windows[k])
                    continue;
                const Window& w = **windows[k];
                const ScalingFit fit = zone_scaling_fit(sweep, k, w.lo, w.hi);
                fits[names[k]] = {{"window", {w.lo, w.hi}},
                                  {"exponent", fit.exponent},
                                  {"intercept", fit.intercept}};
            }
            entry["scaling"] = fits;
            rep["scaling"] = fits;
            break;
        }
        }
    }

    const RunConfig& cfg_;
    unsigned threads_;
    SourceModel src_;
    fs::path dir_;
    std::unique_ptr<RefinedFieldEvaluator> evaluator_;
    std::map<Representation, WaveformSeries> series_;
    std::vector<std::string> artifacts_;
};

}  // namespace

std::string waveform_csv(const WaveformSeries& series)
{
    if (series.samples.empty())
        throw std::invalid_argument("waveform series is empty");
    std::string text = "r,t,Ex,Ey,Ez,term1x,term1y,term1z,term2x,term2y,term2z,term3x,term3y,term3z,representation\n";
    const std::string rep(to_string(series.representation));
    for (std::size_t ir = 0; ir < series.radii.size(); ++ir)
        for (std::size_t it = 0; it < series.times.size(); ++it) {
            const FieldDecomposition& d = series.at(ir, it);
            std::string line = format_double(series.radii[ir]) + "," + format_double(series.times[it]);
            put_vec(line, d.total);
            for (int k = 0; k < 3; ++k)
                if (k < d.term_count())
                    put_vec(line, d.terms[k]);
                else
                    line += ",0,0,0";
            text += line + "," + rep + "\n";
        }
    return text;
}

void emit_waveform_csv(const WaveformSeries& series, const fs::path& path) { write_file(path, waveform_csv(series)); }

std::string velocity_csv(const VelocityProfile& p)
{
    std::string text = "r_mid,t_star_lo,t_star_hi,v\n";
    for (std::size_t i = 0; i < p.local_velocity.size(); ++i)
        text += format_double(0.5 * (p.radii[i] + p.radii[i + 1])) + "," + format_double(p.arrival_times[i]) + "," +
                format_double(p.arrival_times[i + 1]) + "," + format_double(p.local_velocity[i]) + "\n";
    return text;
}

RunReport run_tasks(const RunConfig& config, const RunOptions& options)
{
    return Run(config, options).execute();
}

}  // namespace retfield
