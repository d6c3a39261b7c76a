#pragma once

// Command-line front end: retrieval demos, privacy/code audits, and a
// rate/secrecy sweep. Kept header-only so the test suite can drive the CLI
// in-process and assert on exit codes and output.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspir/tspir.hpp"

namespace tspir {

struct RunConfig {
    unsigned n = 0, m = 0, t = 0, k_files = 2;
    std::uint32_t q = 0;  // 0 = smallest prime > N
    unsigned want = 1;
    std::uint64_t seed = 1;
};

inline std::uint32_t auto_modulus(unsigned n) {
    std::uint32_t q = n + 1;
    while (!PrimeField::is_prime(q)) ++q;
    return q;
}

namespace cli {

inline SchemeParams make_params(const RunConfig& c) {
    return SchemeParams::create(c.n, c.m, c.t, c.k_files, c.q ? c.q : auto_modulus(c.n));
}

inline std::string render_vec(const std::vector<Felem>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s + "]";
}

inline std::string render_outcome_pair(const std::pair<Outcome, Outcome>& w) {
    return render_vec(w.first) + " vs " + render_vec(w.second);
}

inline Mutant parse_mutant(const std::string& s) {
    if (s.empty()) return Mutant::none;
    if (s == "no-mask") return Mutant::no_mask;
    if (s == "no-randomization") return Mutant::no_randomization;
    if (s == "short-mask") return Mutant::short_mask;
    throw InvalidParams("unknown mutant: " + s);
}

inline int cmd_retrieve(const RunConfig& c, const std::string& transcript_path, std::ostream& out) {
    SchemeParams p = make_params(c);
    if (c.want < 1 || c.want > p.files) throw InvalidParams("desired file index out of range");
    SplitMix64 dbrng = SplitMix64(c.seed).fork(0xDB);
    Database db = Database::random(p, dbrng);
    Transcript tr = run_full_session(p, db, c.want, c.seed);

    out << "retrieving file " << c.want << " of " << p.files << " from " << p.servers
        << " servers (M=" << p.storage_dim << ", T=" << p.collusion << ", q=" << p.field.modulus()
        << ")\n";
    for (unsigned r = 1; r <= p.storage_dim; ++r) {
        out << "round " << r << "\n";
        std::vector<std::string> query_txt(p.servers);
        std::vector<Felem> answer_val(p.servers, 0);
        for (const auto& e : tr.messages) {
            if (e.kind != WireKind::query && e.kind != WireKind::answer) continue;
            WireMessage m = decode_message(e.frame);
            if (m.round != r) continue;
            if (m.kind == WireKind::query)
                query_txt[m.node - 1] = render_vec(m.payload);
            else
                answer_val[m.node - 1] = m.payload[0];
        }
        for (unsigned n = 1; n <= p.servers; ++n)
            out << "  server " << n << " query " << query_txt[n - 1]
                << " answer " << answer_val[n - 1] << "\n";
    }
    out << "decoded file (" << p.rows_per_file << "x" << p.storage_dim << "):\n";
    for (unsigned r = 0; r < p.rows_per_file; ++r) {
        out << " ";
        for (unsigned m = 0; m < p.storage_dim; ++m)
            out << " " << tr.decoded_file[std::size_t(r) * p.storage_dim + m];
        out << "\n";
    }
    bool ok = tr.decoded_file == db.file_block(p, c.want).entries();
    RateReport rr = RateReport::make(p, tr);
    out << "rate " << rr.achieved_rate.str() << " (capacity " << rr.capacity.str() << ")\n";
    out << "secrecy " << rr.achieved_secrecy.str() << " (bound " << rr.secrecy_bound.str()
        << ")\n";
    if (!transcript_path.empty()) save_transcript(tr, transcript_path);
    if (!ok) throw DecodeFailure("decoded file differs from the stored file");
    return 0;
}

inline int cmd_audit(const RunConfig& c, const std::string& mode, bool structural,
                     const std::string& mutant_str, unsigned set_size, std::ostream& out) {
    SchemeParams p = make_params(c);
    Mutant mu = parse_mutant(mutant_str);

    if (mode == "codes") {
        bool mds_s = check_mds(p.storage_code);
        bool mds_q = check_mds(p.query_code);
        std::size_t schur = schur_product_dim(p.storage_code, p.query_code);
        bool schur_ok = schur == p.mask_len();
        out << "storage code MDS: " << (mds_s ? "pass" : "FAIL") << "\n";
        out << "query code MDS: " << (mds_q ? "pass" : "FAIL") << "\n";
        out << "componentwise-product dimension: " << schur << " (expected " << p.mask_len()
            << "): " << (schur_ok ? "pass" : "FAIL") << "\n";
        return (mds_s && mds_q && schur_ok) ? 0 : 1;
    }

    PrivacyReport rep;
    std::string label;
    if (mode == "user") {
        rep = verify_user_privacy(p, structural ? AuditMode::structural : AuditMode::exhaustive, mu);
        label = "user-privacy";
    } else if (mode == "db") {
        rep = verify_database_privacy(p, mu);
        label = "database-privacy";
    } else if (mode == "entropy") {
        rep = entropy_symmetry_check(p, set_size);
        label = "entropy-symmetry";
    } else {
        throw InvalidParams("unknown audit mode: " + mode);
    }
    out << label << " audit: " << (rep.pass ? "PASS" : "FAIL") << "\n";
    out << rep.detail << "\n";
    if (rep.enumeration_size) out << "events enumerated: " << rep.enumeration_size << "\n";
    if (!rep.pass) {
        if (rep.witness) out << "witness: " << render_outcome_pair(*rep.witness) << "\n";
        out << "mutual information (display only): " << rep.mutual_information_bits << " bits\n";
    }
    return rep.pass ? 0 : 1;
}

inline int cmd_sweep(unsigned n_min, unsigned n_max, unsigned k_files, std::uint64_t seed,
                     const std::string& path, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!path.empty() && path != "-") {
        file.open(path, std::ios::binary);
        if (!file) {
            err << "cannot open output file: " << path << "\n";
            return 2;
        }
        os = &file;
    }
    *os << "N,M,T,K,q,capacity,achieved_rate,secrecy_bound,achieved_secrecy,decode_ok\n";
    for (unsigned n = n_min; n <= n_max && n_min <= n_max; ++n) {
        std::uint32_t q = auto_modulus(n);
        for (unsigned m = 1; m < n; ++m)
            for (unsigned t = 1; m + t <= n; ++t) {
                SchemeParams p = SchemeParams::create(n, m, t, k_files, q);
                bool ok = false;
                Rational rate(0), secrecy = measure_secrecy_rate(p);
                try {
                    SplitMix64 dbrng = SplitMix64(seed).fork((std::uint64_t(n) << 16) | (m << 8) | t);
                    Database db = Database::random(p, dbrng);
                    Transcript tr = run_full_session(p, db, 1, seed);
                    ok = tr.decoded_file == db.file_block(p, 1).entries();
                    RateReport rr = RateReport::make(p, tr);
                    rate = rr.achieved_rate;
                    secrecy = rr.achieved_secrecy;
                } catch (const Error&) {
                    ok = false;
                }
                *os << n << "," << m << "," << t << "," << k_files << "," << q << ","
                    << capacity(n, m, t).str() << "," << rate.str() << ","
                    << secrecy_lower_bound(n, m, t).str() << "," << secrecy.str() << ","
                    << (ok ? "true" : "false") << "\n";
            }
    }
    return 0;
}

}  // namespace cli

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"symmetric private information retrieval over MDS-coded storage"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string transcript_path, mode, mutant_str, sweep_out = "-";
    bool structural = false;
    unsigned set_size = 0, n_min = 2, n_max = 8;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "number of servers")->required();
        sub->add_option("--m", cfg.m, "storage code dimension")->required();
        sub->add_option("--t", cfg.t, "collusion threshold")->required();
        sub->add_option("--k-files", cfg.k_files, "number of files (default 2)");
        sub->add_option("--q", cfg.q, "field modulus, 0 = smallest prime > N");
        sub->add_option("--seed", cfg.seed, "RNG seed");
    };

    CLI::App* ret = app.add_subcommand("retrieve", "run one retrieval session and report rates");
    add_params(ret);
    ret->add_option("--want", cfg.want, "file index to retrieve (1-based)");
    ret->add_option("--transcript", transcript_path, "write the session transcript to this file");

    CLI::App* aud = app.add_subcommand("audit", "run a privacy or code audit");
    add_params(aud);
    aud->add_option("--mode", mode, "user | db | entropy | codes")
        ->required()
        ->check(CLI::IsMember({"user", "db", "entropy", "codes"}));
    aud->add_flag("--structural", structural, "prove user privacy from the code structure");
    aud->add_option("--mutant", mutant_str, "no-mask | no-randomization | short-mask")
        ->check(CLI::IsMember({"no-mask", "no-randomization", "short-mask"}));
    aud->add_option("--set-size", set_size, "node-set size for the entropy audit (default M+T-1)");

    CLI::App* swp = app.add_subcommand("sweep", "tabulate rates over a parameter grid as CSV");
    swp->add_option("--n-min", n_min, "smallest N (default 2)");
    swp->add_option("--n-max", n_max, "largest N (default 8)");
    swp->add_option("--k-files", cfg.k_files, "number of files per config (default 2)");
    swp->add_option("--seed", cfg.seed, "RNG seed");
    swp->add_option("--out", sweep_out, "output path, - for stdout");

    std::vector<const char*> argv;
    argv.push_back("tspir");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (ret->parsed()) return cli::cmd_retrieve(cfg, transcript_path, out);
        if (aud->parsed()) return cli::cmd_audit(cfg, mode, structural, mutant_str, set_size, out);
        if (swp->parsed()) return cli::cmd_sweep(n_min, n_max, cfg.k_files, cfg.seed, sweep_out, out, err);
    } catch (const EnumerationTooLarge& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const InvalidParams& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const InvalidRegime& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace tspir
