//! Command-line front end: exact verification, decomposition, and flow
//! iteration for 2×2×2×2 blocks of 4×4 vertex matrices over GF(2).
//!
//! Exit codes: 0 = success / all checks pass, 1 = a verification failed,
//! 2 = input error.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use blockspin_core::search::{decompose_pipeline, iterate_flow, BitBlock, Dictionary};
use blockspin_core::{
    randomized_summand_check, verify_frobenius_in, verify_frobenius_symbolic,
    verify_minor_transpose, FrobeniusReport, F2,
};
use clap::{Parser, Subcommand};

mod matrixfile;
mod report;

use report::{
    bitstring, fmt_dims, step_sections, summand_sections, CheckLine, ReportDocument,
    TrialsSection,
};

#[derive(Parser)]
#[command(
    name = "blockspin",
    version,
    about = "Exact tools for 2×2×2×2 blocks of binary vertex matrices"
)]
struct Cli {
    /// Emit the machine-readable JSON report instead of human text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the squared-entry self-similarity identities of the block
    VerifySymbolic {
        /// Also check the symbolic minor-transpose identity
        #[arg(long)]
        transpose_check: bool,
        /// Check a concrete binary matrix instead of the fully symbolic one
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Randomized check that the cofactor summand splits off over GF(2^k)
    VerifySummand {
        /// Number of non-degenerate random matrices to test
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Extension degree k of the coefficient field GF(2^k)
        #[arg(long, default_value_t = 16)]
        ext_degree: u32,
        /// PRNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decompose the block of a binary matrix into graded invariant summands
    Decompose {
        /// Matrix file: 4 lines of 4 whitespace-separated 0/1 tokens
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Iterate the blocking flow on newly discovered matrices
    Iterate {
        /// Matrix file: 4 lines of 4 whitespace-separated 0/1 tokens
        #[arg(long)]
        matrix: PathBuf,
        /// Number of flow steps
        #[arg(long)]
        steps: usize,
    },
    /// Build the 32×32 block of a binary matrix
    Block {
        /// Matrix file: 4 lines of 4 whitespace-separated 0/1 tokens
        #[arg(long)]
        matrix: PathBuf,
        /// Print the full bit grid (human mode)
        #[arg(long)]
        print: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::VerifySymbolic {
            transpose_check,
            matrix,
        } => cmd_verify_symbolic(cli.json, transpose_check, matrix.as_deref()),
        Command::VerifySummand {
            trials,
            ext_degree,
            seed,
        } => cmd_verify_summand(cli.json, trials, ext_degree, seed),
        Command::Decompose { matrix } => cmd_decompose(cli.json, &matrix),
        Command::Iterate { matrix, steps } => cmd_iterate(cli.json, &matrix, steps),
        Command::Block { matrix, print } => cmd_block(cli.json, &matrix, print),
    }
}

fn frobenius_checks(rep: &FrobeniusReport, doc: &mut ReportDocument) {
    for c in &rep.checks {
        doc.checks.push(CheckLine {
            name: format!("squared-entry identity ({},{})", c.j + 1, c.k + 1),
            pass: c.pass,
            detail: c.detail.clone(),
        });
    }
}

fn cmd_verify_symbolic(
    json: bool,
    transpose_check: bool,
    matrix: Option<&std::path::Path>,
) -> Result<ExitCode, String> {
    let mut doc = ReportDocument::new("verify-symbolic");
    let mut human = Vec::new();
    match matrix {
        None => {
            human.push("squared-entry identities, fully symbolic vertex matrix".to_string());
            frobenius_checks(&verify_frobenius_symbolic(), &mut doc);
        }
        Some(path) => {
            let mf = matrixfile::load(path)?;
            doc.input_sha256 = Some(mf.sha256.clone());
            human.push(format!(
                "squared-entry identities over GF(2), input sha256 {}",
                mf.sha256
            ));
            frobenius_checks(&verify_frobenius_in(&F2, &mf.matrix.to_mat()), &mut doc);
        }
    }
    if transpose_check {
        doc.checks.push(CheckLine {
            name: "minor-transpose identity".to_string(),
            pass: verify_minor_transpose(),
            detail: None,
        });
    }
    for c in &doc.checks {
        human.push(format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
    }
    let pass = doc.all_checks_pass();
    human.push(if pass {
        format!("all {} checks hold", doc.checks.len())
    } else {
        "verification FAILED".to_string()
    });
    emit(json, &doc, &human);
    Ok(exit_pass(pass))
}

fn cmd_verify_summand(
    json: bool,
    trials: usize,
    ext_degree: u32,
    seed: u64,
) -> Result<ExitCode, String> {
    if trials == 0 {
        return Err("--trials must be at least 1".to_string());
    }
    if !(1..=64).contains(&ext_degree) {
        return Err("--ext-degree must be in 1..=64".to_string());
    }
    let rep = randomized_summand_check(trials, ext_degree, seed);
    let mut doc = ReportDocument::new("verify-summand");
    doc.seed = Some(seed);
    doc.checks.push(CheckLine {
        name: "cofactor summand splits off in every trial".to_string(),
        pass: rep.all_pass(),
        detail: None,
    });
    doc.trials = Some(TrialsSection {
        trials: rep.trials,
        ext_degree: rep.ext_degree,
        passes: rep.passes,
        degenerate_redraws: rep.degenerate_redraws,
        failures: rep
            .failures
            .iter()
            .map(|f| format!("trial {}: {}", f.trial, f.failed_check))
            .collect(),
    });
    let mut human = vec![format!(
        "split check over GF(2^{}), seed {}: {}/{} trials pass, {} degenerate redraws",
        ext_degree, seed, rep.passes, rep.trials, rep.degenerate_redraws
    )];
    for f in &rep.failures {
        human.push(format!("trial {} FAILED: {}", f.trial, f.failed_check));
    }
    let pass = rep.all_pass();
    human.push(if pass { "all trials pass".into() } else { "verification FAILED".into() });
    emit(json, &doc, &human);
    Ok(exit_pass(pass))
}

fn cmd_decompose(json: bool, matrix: &std::path::Path) -> Result<ExitCode, String> {
    let mf = matrixfile::load(matrix)?;
    let block = BitBlock::from_vertex_matrix(&mf.matrix);
    let mut dict = Dictionary::with_input(&mf.matrix);
    let dec = decompose_pipeline(&mf.matrix, &mut dict);

    let mut doc = ReportDocument::new("decompose");
    doc.input_sha256 = Some(mf.sha256.clone());
    let invariant = dec.summands.iter().all(|s| s.subspace.is_invariant(&block));
    doc.checks.push(CheckLine {
        name: "every summand re-verified invariant".to_string(),
        pass: invariant,
        detail: None,
    });
    let mut totals = dec.remainder_dims;
    for s in &dec.summands {
        for (t, d) in totals.iter_mut().zip(s.dims()) {
            *t += d;
        }
    }
    doc.checks.push(CheckLine {
        name: "summand and remainder dimensions fill the edge space".to_string(),
        pass: totals == [8; 4],
        detail: Some(format!("per-direction totals {}", fmt_dims(totals))),
    });
    doc.summands = Some(summand_sections(&dec));
    doc.remainder_dims = Some(dec.remainder_dims);
    doc.complete = Some(dec.complete);

    let mut human = vec![format!("decomposition, input sha256 {}", mf.sha256)];
    for (i, s) in dec.summands.iter().enumerate() {
        let copies = s.collapsed.as_ref().map_or(1, |&(_, d)| d);
        let mut line = format!(
            "summand {}: dims {} label {}",
            i + 1,
            fmt_dims(s.dims()),
            s.label
        );
        if copies > 1 {
            line.push_str(&format!(" (x{copies} copies)"));
        }
        human.push(line);
        if let Some((m, _)) = &s.collapsed {
            human.push(format!(
                "  acts as: {}",
                report::matrix_rows(m).join(" ")
            ));
        }
        for j in 0..4 {
            if s.basis[j].nrows() > 0 {
                let rows: Vec<String> = (0..s.basis[j].nrows())
                    .map(|r| bitstring(s.basis[j].row(r), 8))
                    .collect();
                human.push(format!("  basis V{}: {}", j + 1, rows.join(" ")));
            }
        }
    }
    human.push(format!(
        "remainder: {} ({})",
        fmt_dims(dec.remainder_dims),
        if dec.complete { "complete decomposition" } else { "incomplete" }
    ));
    for c in &doc.checks {
        human.push(format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
    }
    emit(json, &doc, &human);
    Ok(exit_pass(doc.all_checks_pass()))
}

fn cmd_iterate(json: bool, matrix: &std::path::Path, steps: usize) -> Result<ExitCode, String> {
    if steps == 0 {
        return Err("--steps must be at least 1".to_string());
    }
    let mf = matrixfile::load(matrix)?;
    let states = iterate_flow(&mf.matrix, steps);

    let mut doc = ReportDocument::new("iterate");
    doc.input_sha256 = Some(mf.sha256.clone());
    let mut accounting = true;
    for st in &states {
        for d in &st.decompositions {
            let mut totals = d.remainder_dims;
            for e in &d.entries {
                for (t, x) in totals.iter_mut().zip(e.dims) {
                    *t += x;
                }
            }
            if totals != [8; 4] {
                accounting = false;
            }
        }
    }
    doc.checks.push(CheckLine {
        name: "dimension accounting holds at every step".to_string(),
        pass: accounting,
        detail: None,
    });
    doc.steps = Some(step_sections(&states));

    let mut human = vec![format!("blocking flow, input sha256 {}", mf.sha256)];
    for st in &states {
        if st.stationary {
            human.push(format!("step {}: stationary", st.step));
            continue;
        }
        human.push(format!("step {}:", st.step));
        for d in &st.decompositions {
            let entries: Vec<String> = d
                .entries
                .iter()
                .map(|e| {
                    let copies = if e.copies > 1 {
                        format!(" x{}", e.copies)
                    } else {
                        String::new()
                    };
                    format!("{} {}{}", e.label, fmt_dims(e.dims), copies)
                })
                .collect();
            human.push(format!(
                "  source {}: {}; remainder {}",
                d.source,
                entries.join("; "),
                fmt_dims(d.remainder_dims)
            ));
        }
    }
    for c in &doc.checks {
        human.push(format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
    }
    emit(json, &doc, &human);
    Ok(exit_pass(doc.all_checks_pass()))
}

fn cmd_block(json: bool, matrix: &std::path::Path, print: bool) -> Result<ExitCode, String> {
    let mf = matrixfile::load(matrix)?;
    let block = BitBlock::from_vertex_matrix(&mf.matrix);
    let rows: Vec<String> = (0..32).map(|r| bitstring(block.full().row(r), 32)).collect();

    let mut doc = ReportDocument::new("block");
    doc.input_sha256 = Some(mf.sha256.clone());
    doc.rows = Some(rows.clone());

    let mut human = vec![format!(
        "32×32 block over GF(2), input sha256 {}",
        mf.sha256
    )];
    if print {
        for (r, row) in rows.iter().enumerate() {
            if r > 0 && r % 8 == 0 {
                human.push(String::new());
            }
            // thick-entry boundaries: space between 8-column groups
            let grouped: Vec<&str> = (0..4).map(|g| &row[8 * g..8 * (g + 1)]).collect();
            human.push(grouped.join(" "));
        }
    }
    emit(json, &doc, &human);
    Ok(ExitCode::SUCCESS)
}

fn emit(json: bool, doc: &ReportDocument, human: &[String]) {
    let text = if json {
        doc.to_json()
    } else {
        let mut t = human.join("\n");
        t.push('\n');
        t
    };
    let mut out = io::stdout().lock();
    // A closed pipe (e.g. piping into `head`) is not an error worth a panic;
    // stop quietly with the conventional SIGPIPE exit status.
    if out.write_all(text.as_bytes()).and_then(|()| out.flush()).is_err() {
        std::process::exit(141);
    }
}

fn exit_pass(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
