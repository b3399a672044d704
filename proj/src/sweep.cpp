// sweep.cpp: evolution + criteria over (xi, n), CSV and series output

#include "nlent/sweep.hpp"

#include "nlent/covariance.hpp"
#include "nlent/errors.hpp"
#include "nlent/quadratures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace nlent {

QuantumState initial_state(const SweepConfig& config)
{
    const ModeLayout layout = config.layout();
    std::vector<QuantumState::SingleMode> factors;
    factors.emplace_back(coherent_state(cplx(config.alpha_p, 0.0), config.dims[0]));
    const auto local = [](double n_th, int dim) -> QuantumState::SingleMode {
        if (n_th > 0.0) return thermal_state(n_th, dim);
        return fock_state(0, dim);
    };
    factors.push_back(local(config.thermal_a, config.dims[1]));
    factors.push_back(local(config.thermal_b, config.dims[2]));
    return QuantumState::product(layout, factors);
}

namespace {

EvolutionConfig evolution_config(const SweepConfig& config, std::vector<double> grid)
{
    EvolutionConfig ec;
    ec.xi_grid = std::move(grid);
    ec.alpha_p = config.alpha_p;
    ec.kappa = config.kappa;
    ec.tolerance = config.tolerance;
    ec.krylov_dim = config.krylov_dim;
    ec.truncation_guard = config.truncation_guard;
    return ec;
}

SweepRow make_row(const TrajectoryPoint& point, const QuadratureSet& ops, std::optional<double> nz)
{
    const HigherOrderCovariance cov = build_covariance(point.state, ops);
    SweepRow row;
    row.xi = point.xi;
    row.report = evaluate(cov, nz);
    row.truncation_flag = point.truncation_flag;
    row.physical = row.report.uncertainty >= -kPhysicalityTolerance && row.report.ineq7_margin >= -kPhysicalityTolerance;
    row.max_first_moment = cov.first_moments.cwiseAbs().maxCoeff();
    row.top_populations = point.top_populations;
    row.V = cov.V;
    row.f_kA = cov.f_kA;
    row.f_lB = cov.f_lB;
    return row;
}

struct Task {
    std::size_t point_index = 0;
    std::size_t n_index = 0;
    std::shared_ptr<const TrajectoryPoint> point;
};

// Fixed-size pool fed through a bounded queue so that at most a few states are
// held in memory while the evolution runs ahead.
class WorkerPool {
public:
    WorkerPool(unsigned workers, std::size_t capacity, std::function<void(const Task&)> work)
        : capacity_(capacity), work_(std::move(work))
    {
        for (unsigned i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
    }

    ~WorkerPool()
    {
        try {
            finish();
        } catch (...) {
            // a failure already propagating from the producer takes precedence
        }
    }

    void push(Task task)
    {
        std::unique_lock lock(mutex_);
        space_.wait(lock, [this] { return queue_.size() < capacity_ || error_; });
        if (error_) return;
        queue_.push_back(std::move(task));
        ready_.notify_one();
    }

    // Drains the queue, joins the workers and rethrows the first failure.
    void finish()
    {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        ready_.notify_all();
        for (auto& t : threads_) {
            if (t.joinable()) t.join();
        }
        threads_.clear();
        if (error_) {
            auto e = error_;
            error_ = nullptr;
            std::rethrow_exception(e);
        }
    }

private:
    void loop()
    {
        for (;;) {
            Task task;
            {
                std::unique_lock lock(mutex_);
                ready_.wait(lock, [this] { return !queue_.empty() || closed_; });
                if (queue_.empty()) return;
                task = std::move(queue_.front());
                queue_.pop_front();
            }
            space_.notify_one();
            try {
                work_(task);
            } catch (...) {
                std::lock_guard lock(mutex_);
                if (!error_) error_ = std::current_exception();
                queue_.clear();
                space_.notify_all();
            }
        }
    }

    std::size_t capacity_;
    std::function<void(const Task&)> work_;
    std::vector<std::thread> threads_;
    std::deque<Task> queue_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::condition_variable space_;
    bool closed_ = false;
    std::exception_ptr error_;
};

unsigned worker_count(const SweepConfig& config)
{
    if (config.workers > 0) return config.workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Rows for every grid point of `grid` on `config`'s layout.
std::vector<SweepRow> sweep_rows(const SweepConfig& config, const std::vector<double>& grid)
{
    config.validate();
    const ModeLayout layout = config.layout();
    const TruncatedOperator hamiltonian = build_hamiltonian(InteractionSpec{config.k, config.l, config.kappa, layout});
    std::vector<QuadratureSet> sets;
    for (int n : config.hierarchy) sets.push_back(quadrature_set(n, config.k, config.l, layout));

    const std::size_t per_point = sets.size();
    std::vector<SweepRow> rows(grid.size() * per_point);
    std::vector<std::optional<double>> nz(grid.size());

    const unsigned workers = worker_count(config);
    WorkerPool pool(workers, 2 * workers + per_point, [&](const Task& task) {
        if (task.n_index == per_point) {
            nz[task.point_index] = nha_zubairy(task.point->state);
            return;
        }
        rows[task.point_index * per_point + task.n_index] = make_row(*task.point, sets[task.n_index], std::nullopt);
    });

    std::size_t index = 0;
    evolve_streaming(initial_state(config), hamiltonian, evolution_config(config, grid), [&](TrajectoryPoint&& p) {
        auto shared = std::make_shared<const TrajectoryPoint>(std::move(p));
        for (std::size_t i = 0; i < per_point; ++i) pool.push(Task{index, i, shared});
        if (config.with_nz) pool.push(Task{index, per_point, shared});
        ++index;
    });
    pool.finish();

    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (std::size_t i = 0; i < per_point; ++i) rows[p * per_point + i].report.nz = nz[p];
    }
    return rows;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) { return sweep_rows(config, config.grid()); }

std::string format_number(double value)
{
    if (value == 0.0) value = 0.0;  // no negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::vector<std::string> csv_columns()
{
    std::vector<std::string> cols = {"n",        "k",           "l",         "xi",         "nu_minus",     "ineq7",
                                     "ineq8",    "lemma1",      "detC",      "nz",         "verdict",      "truncation_flag",
                                     "uncertainty", "consistent", "physical", "max_first_moment", "top_pop_P", "top_pop_A",
                                     "top_pop_B"};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) cols.push_back("V" + std::to_string(i) + std::to_string(j));
    }
    cols.push_back("f_kA");
    cols.push_back("f_lB");
    return cols;
}

double column_value(const SweepRow& row, const std::string& column)
{
    const WitnessReport& r = row.report;
    if (column == "n") return r.n;
    if (column == "k") return r.k;
    if (column == "l") return r.l;
    if (column == "xi") return row.xi;
    if (column == "nu_minus") return r.nu_minus;
    if (column == "ineq7") return r.ineq7_margin;
    if (column == "ineq8") return r.ineq8_margin;
    if (column == "lemma1") return r.lemma1_value;
    if (column == "detC") return r.detC;
    if (column == "nz") {
        if (!r.nz) throw ConfigError("column 'nz' is absent; rerun the sweep with --with-nz");
        return *r.nz;
    }
    if (column == "uncertainty") return r.uncertainty;
    if (column == "max_first_moment") return row.max_first_moment;
    if (column == "f_kA") return row.f_kA;
    if (column == "f_lB") return row.f_lB;
    if (column.size() == 3 && column[0] == 'V' && std::isdigit(static_cast<unsigned char>(column[1]))
        && std::isdigit(static_cast<unsigned char>(column[2]))) {
        const int i = column[1] - '0';
        const int j = column[2] - '0';
        if (i < 4 && j < 4) return row.V(i, j);
    }
    if (column.rfind("top_pop_", 0) == 0) {
        const std::string m = column.substr(8);
        const std::size_t idx = m == "P" ? 0 : m == "A" ? 1 : m == "B" ? 2 : 3;
        if (idx < row.top_populations.size()) return row.top_populations[idx];
    }
    throw ConfigError("unknown column '" + column + "'");
}

void write_csv(const std::vector<SweepRow>& rows, const SweepConfig& config, const std::string& path)
{
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        for (const auto& line : describe(config)) out << "# " << line << '\n';
        const auto cols = csv_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < cols.size(); ++i) {
                const std::string& c = cols[i];
                if (i) out << ',';
                if (c == "n" || c == "k" || c == "l") out << static_cast<int>(column_value(row, c));
                else if (c == "nz") out << (row.report.nz ? format_number(*row.report.nz) : "");
                else if (c == "verdict") out << to_string(row.report.verdict);
                else if (c == "truncation_flag") out << (row.truncation_flag ? 1 : 0);
                else if (c == "consistent") out << (row.report.consistent ? 1 : 0);
                else if (c == "physical") out << (row.physical ? 1 : 0);
                else out << format_number(column_value(row, c));
            }
            out << '\n';
        }
        out.flush();
        if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, target);
}

std::vector<SweepRow> read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<SweepRow> rows;
    const auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::stringstream ss(s);
        while (std::getline(ss, item, ',')) out.push_back(item);
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (header.empty()) {
            header = split(line);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != header.size()) throw ConfigError("'" + path + "': row with " + std::to_string(cells.size()) + " cells, header has " + std::to_string(header.size()));
        SweepRow row;
        row.top_populations.assign(3, 0.0);
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string& c = header[i];
            const std::string& v = cells[i];
            const auto num = [&] {
                try {
                    return std::stod(v);
                } catch (const std::exception&) {
                    throw ConfigError("'" + path + "': column " + c + " holds '" + v + "'");
                }
            };
            WitnessReport& r = row.report;
            if (c == "n") r.n = static_cast<int>(num());
            else if (c == "k") r.k = static_cast<int>(num());
            else if (c == "l") r.l = static_cast<int>(num());
            else if (c == "xi") row.xi = num();
            else if (c == "nu_minus") r.nu_minus = num();
            else if (c == "ineq7") r.ineq7_margin = num();
            else if (c == "ineq8") r.ineq8_margin = num();
            else if (c == "lemma1") r.lemma1_value = num();
            else if (c == "detC") r.detC = num();
            else if (c == "nz") {
                if (!v.empty()) r.nz = num();
            } else if (c == "verdict") {
                r.verdict = v == "entangled" ? Verdict::Entangled : v == "separable" ? Verdict::Separable : Verdict::Boundary;
            } else if (c == "truncation_flag") row.truncation_flag = num() != 0.0;
            else if (c == "uncertainty") r.uncertainty = num();
            else if (c == "consistent") r.consistent = num() != 0.0;
            else if (c == "physical") row.physical = num() != 0.0;
            else if (c == "max_first_moment") row.max_first_moment = num();
            else if (c == "top_pop_P") row.top_populations[0] = num();
            else if (c == "top_pop_A") row.top_populations[1] = num();
            else if (c == "top_pop_B") row.top_populations[2] = num();
            else if (c == "f_kA") row.f_kA = num();
            else if (c == "f_lB") row.f_lB = num();
            else if (c.size() == 3 && c[0] == 'V') row.V(c[1] - '0', c[2] - '0') = num();
        }
        rows.push_back(std::move(row));
    }
    if (header.empty()) throw ConfigError("'" + path + "': no header line");
    return rows;
}

int exit_code(const std::vector<SweepRow>& rows)
{
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.flagged(); }) ? 2 : 0;
}

ConvergenceReport convergence_check(const SweepConfig& config)
{
    config.validate();
    const auto full = config.grid();
    std::vector<double> grid;
    for (std::size_t i = 0; i < full.size(); i += static_cast<std::size_t>(config.convergence_stride)) grid.push_back(full[i]);
    if (grid.back() != full.back()) grid.push_back(full.back());

    SweepConfig refined = config;
    for (auto& d : refined.dims) d += config.convergence_step;

    const auto base_rows = sweep_rows(config, grid);
    const auto fine_rows = sweep_rows(refined, grid);

    ConvergenceReport report;
    report.base_dims = config.dims;
    report.refined_dims = refined.dims;
    report.threshold = config.convergence_threshold;
    for (std::size_t i = 0; i < base_rows.size(); ++i) {
        ConvergenceEntry e;
        e.xi = base_rows[i].xi;
        e.n = base_rows[i].report.n;
        e.nu_base = base_rows[i].report.nu_minus;
        e.nu_refined = fine_rows[i].report.nu_minus;
        e.nz_base = base_rows[i].report.nz;
        e.nz_refined = fine_rows[i].report.nz;
        report.max_delta = std::max(report.max_delta, std::abs(e.nu_refined - e.nu_base));
        if (e.nz_base && e.nz_refined) report.max_delta = std::max(report.max_delta, std::abs(*e.nz_refined - *e.nz_base));
        report.entries.push_back(e);
    }
    report.passed = report.max_delta < report.threshold;
    return report;
}

void print_report(const ConvergenceReport& r, std::ostream& out)
{
    const auto dims = [](const std::array<int, 3>& d) {
        return std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]);
    };
    out << "# convergence: dims " << dims(r.base_dims) << " -> " << dims(r.refined_dims) << '\n';
    out << "xi,n,nu_base,nu_refined,delta_nu,nz_base,nz_refined\n";
    for (const auto& e : r.entries) {
        out << format_number(e.xi) << ',' << e.n << ',' << format_number(e.nu_base) << ',' << format_number(e.nu_refined)
            << ',' << format_number(std::abs(e.nu_refined - e.nu_base)) << ','
            << (e.nz_base ? format_number(*e.nz_base) : "") << ',' << (e.nz_refined ? format_number(*e.nz_refined) : "")
            << '\n';
    }
    out << "# max_delta = " << format_number(r.max_delta) << " threshold = " << format_number(r.threshold) << ' '
        << (r.passed ? "PASS" : "FAIL") << '\n';
}

SeriesSpec parse_series(const std::string& text)
{
    SeriesSpec s;
    const auto colon = text.find(':');
    s.column = text.substr(0, colon);
    if (s.column.empty()) throw ConfigError("series '" + text + "': empty column name");
    if (colon != std::string::npos) {
        try {
            s.n = std::stoi(text.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("series '" + text + "': bad hierarchy index");
        }
    }
    return s;
}

void emit_plot_data(const std::vector<SweepRow>& rows, const std::vector<SeriesSpec>& selection, std::ostream& out)
{
    if (selection.empty()) throw ConfigError("emit_plot_data: no series selected");
    if (rows.empty()) throw ConfigError("emit_plot_data: no rows");
    for (std::size_t s = 0; s < selection.size(); ++s) {
        const SeriesSpec& spec = selection[s];
        if (s) out << '\n';
        out << "# " << spec.column << " n=" << spec.n << '\n';
        std::size_t count = 0;
        for (const auto& row : rows) {
            if (row.report.n != spec.n) continue;
            out << format_number(row.xi) << ' ' << format_number(column_value(row, spec.column)) << '\n';
            ++count;
        }
        if (count == 0) throw ConfigError("series " + spec.column + ":" + std::to_string(spec.n) + " matches no rows");
    }
}

} // namespace nlent
