//! `nit` — command-line front end for the exact radix-n information
//! toolkit. Every subcommand reads and writes canonical JSON (sorted
//! keys, no insignificant whitespace) so outputs are byte-stable and
//! diff-able; `-` stands for stdin wherever a file is expected.
//!
//! Exit codes: 0 success, 1 a checked claim failed (non-separating
//! frame, spectrum collision, failed demo), 2 malformed input or usage,
//! 3 a configured capacity limit was exceeded.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use nit_core::{
    basis_refines, canonical_frame, canonical_nit_operators, classify_partition, context_operator,
    diagonal_bases, enumerate_separating_frames, index_from_tuple, mapping_permutations,
    measurement_probabilities, operator_from_partition, optimal_strategy, orbit_separation_sample,
    overlap_sq, partition_from_operator, plan_straight_line, standard_basis, Classification,
    DiagonalOperator, Error, ExactVector, Frame, Outcome, Partition, Permutation,
    PrimeLabelSet, RefineOutcome, Repertoire, SeparationVerdict, SpectrumVerdict, StateIndex,
    WorstCase,
};

#[derive(Parser)]
#[command(
    name = "nit",
    version,
    about = "Exact tools for radix-n information: separating frames of state \
             partitions, prime-labeled diagonal operators, entangled bases, \
             and n-ary identification strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, check, and transform frames of state partitions
    #[command(subcommand)]
    Frame(FrameCommand),
    /// Diagonal operators whose level sets realize partitions
    #[command(subcommand)]
    Op(OpCommand),
    /// Exact integer state vectors, entangled bases, and probabilities
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Plan and score identification strategies over partition questions
    #[command(subcommand)]
    Search(SearchCommand),
    /// Reference worked examples bundled with the library
    #[command(subcommand)]
    Paper(PaperCommand),
}

#[derive(Subcommand)]
enum FrameCommand {
    /// Emit the coordinate frame: partition i groups states by digit i
    Gen {
        /// Radix (blocks per partition)
        #[arg(long)]
        n: u64,
        /// Number of partitions (digits)
        #[arg(long)]
        k: u32,
    },
    /// Check that a frame separates its states; exit 1 with a witness
    /// when it does not
    Verify {
        /// Frame JSON file, or `-` for stdin
        file: PathBuf,
        /// Additionally scan this many random state permutations and
        /// confirm each preserves the verdict
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for the permutation sample
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Meet of all partitions in a frame (the joint observable)
    Meet {
        /// Frame JSON file, or `-` for stdin
        file: PathBuf,
    },
    /// Apply a state permutation, given in cycle notation, to a frame
    Permute {
        /// Frame JSON file, or `-` for stdin
        file: PathBuf,
        /// Permutation in cycle notation, e.g. "(1)(2,9,3,5)(4,6,7,8)"
        #[arg(long)]
        cycles: String,
    },
    /// Classify each partition as single-coordinate or entangled
    Classify {
        /// Frame JSON file, or `-` for stdin
        file: PathBuf,
    },
    /// List every separating frame of k n-block partitions of n^k states
    Enumerate {
        /// Radix (blocks per partition)
        #[arg(long)]
        n: u64,
        /// Number of partitions
        #[arg(long)]
        k: u32,
        /// Only frames whose blocks all hold n^(k-1) states
        #[arg(long)]
        balanced: bool,
    },
}

#[derive(Subcommand)]
enum OpCommand {
    /// Build the diagonal operator realizing a partition with the given
    /// prime labels (block i gets label i)
    Build {
        /// Partition JSON file (array of blocks), or `-` for stdin
        partition: PathBuf,
        /// Comma-separated distinct primes, one per block
        #[arg(long)]
        labels: String,
    },
    /// Componentwise product of diagonal operators
    Context {
        /// Operator JSON files; `-` reads one operator from stdin
        files: Vec<PathBuf>,
    },
    /// Check that all diagonal entries are distinct; exit 1 with the
    /// colliding value and positions when they are not
    Spectrum {
        /// Operator JSON file, or `-` for stdin
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum BasisCommand {
    /// The two entangled diagonal families for odd n (exact integer
    /// coefficients, pairwise squared overlap 1/n^2 across families)
    Diag {
        /// Radix; the families live on n^2 states
        #[arg(long)]
        n: u64,
    },
    /// Squared overlap |<u,v>|^2 / (|u|^2 |v|^2) between two vectors of
    /// a stored collection
    Overlap {
        /// Either a `basis diag` output or a JSON array of vectors;
        /// `-` for stdin
        file: PathBuf,
        /// First vector, 0-based (family 1 before family 2 for diag files)
        #[arg(long)]
        i: usize,
        /// Second vector, 0-based
        #[arg(long)]
        j: usize,
    },
    /// Block-measurement probabilities of a state under a partition
    Probs {
        /// State vector JSON file, or `-` for stdin
        state: PathBuf,
        /// Partition JSON file (array of blocks)
        partition: PathBuf,
    },
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Ask a frame's partitions in order: depth is always exactly k
    Plan {
        /// Frame JSON file, or `-` for stdin
        file: PathBuf,
    },
    /// Optimal adaptive strategy for a question repertoire, minimizing
    /// worst-case depth, then expected depth, then question indices
    Optimal {
        /// Repertoire JSON file {"ground_size":…,"questions":[…]}, or `-`
        file: PathBuf,
    },
    /// Replay a strategy against a hidden state and print the transcript
    Eval {
        /// Strategy JSON file, or `-` for stdin
        file: PathBuf,
        /// Hidden state (1-based)
        #[arg(long)]
        hidden: u32,
    },
}

#[derive(Subcommand)]
enum PaperCommand {
    /// Run the bundled worked examples; exit 0 only if every one holds
    Demo,
}

#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl AppError {
    fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Core(Error::Capacity { .. }) => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }
}

fn read_input(path: &Path) -> Result<String, AppError> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| AppError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, AppError> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|source| AppError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn emit<T: serde::Serialize>(value: &T) -> Result<(), AppError> {
    println!("{}", nit_core::json::to_canonical_json(value)?);
    Ok(())
}

fn rational_value(r: &BigRational) -> Value {
    json!({"den": r.denom().to_string(), "num": r.numer().to_string()})
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(command: Command) -> Result<ExitCode, AppError> {
    match command {
        Command::Frame(cmd) => run_frame(cmd),
        Command::Op(cmd) => run_op(cmd),
        Command::Basis(cmd) => run_basis(cmd),
        Command::Search(cmd) => run_search(cmd),
        Command::Paper(PaperCommand::Demo) => run_demo(),
    }
}

fn run_frame(command: FrameCommand) -> Result<ExitCode, AppError> {
    match command {
        FrameCommand::Gen { n, k } => {
            emit(&canonical_frame(n, k)?)?;
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Verify {
            file,
            samples,
            seed,
        } => {
            let frame: Frame = load(&file)?;
            match frame.check_separating() {
                SeparationVerdict::NotSeparating { witness } => {
                    emit(&json!({"separating": false, "witness": witness}))?;
                    Ok(ExitCode::from(1))
                }
                SeparationVerdict::Separating => {
                    let Some(samples) = samples else {
                        emit(&json!({"separating": true}))?;
                        return Ok(ExitCode::SUCCESS);
                    };
                    let scan = orbit_separation_sample(&frame, samples, seed)?;
                    let consistent = scan.consistent();
                    emit(&json!({
                        "orbit": {
                            "checked": scan.checked,
                            "consistent": consistent,
                            "counterexample": scan.counterexample,
                        },
                        "separating": true,
                    }))?;
                    Ok(if consistent {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
            }
        }
        FrameCommand::Meet { file } => {
            let frame: Frame = load(&file)?;
            emit(&frame.meet_all())?;
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Permute { file, cycles } => {
            let frame: Frame = load(&file)?;
            let p = Permutation::from_cycles(&cycles, frame.num_states() as u32)?;
            emit(&frame.apply_permutation(&p)?)?;
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Classify { file } => {
            let frame: Frame = load(&file)?;
            let mut rows = Vec::with_capacity(frame.partitions().len());
            for p in frame.partitions() {
                let entry = match classify_partition(p, u64::from(frame.n()), frame.k())? {
                    Classification::Local {
                        particle,
                        relabeling,
                    } => json!({
                        "kind": "local",
                        "particle": particle,
                        "relabeling": relabeling,
                    }),
                    Classification::Nonlocal => json!({"kind": "nonlocal"}),
                };
                rows.push(entry);
            }
            emit(&rows)?;
            Ok(ExitCode::SUCCESS)
        }
        FrameCommand::Enumerate { n, k, balanced } => {
            let frames = enumerate_separating_frames(n, k, balanced)?;
            emit(&json!({"count": frames.len(), "frames": frames}))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_op(command: OpCommand) -> Result<ExitCode, AppError> {
    match command {
        OpCommand::Build { partition, labels } => {
            let p: Partition = load(&partition)?;
            let labels = parse_labels(&labels)?;
            emit(&operator_from_partition(&p, &labels)?)?;
            Ok(ExitCode::SUCCESS)
        }
        OpCommand::Context { files } => {
            if files.is_empty() {
                return Err(
                    Error::Domain("op context needs at least one operator file".into()).into(),
                );
            }
            let ops = files
                .iter()
                .map(|f| load::<DiagonalOperator>(f))
                .collect::<Result<Vec<_>, _>>()?;
            emit(&context_operator(&ops)?)?;
            Ok(ExitCode::SUCCESS)
        }
        OpCommand::Spectrum { file } => {
            let op: DiagonalOperator = load(&file)?;
            match op.spectrum() {
                SpectrumVerdict::Distinct => {
                    emit(&json!({"distinct": true}))?;
                    Ok(ExitCode::SUCCESS)
                }
                SpectrumVerdict::Collision { value, positions } => {
                    emit(&json!({
                        "collision": {
                            "positions": positions,
                            "value": value.to_string(),
                        },
                        "distinct": false,
                    }))?;
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn parse_labels(text: &str) -> Result<PrimeLabelSet, AppError> {
    let primes = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("label {part:?} is not an unsigned integer")))
        })
        .collect::<nit_core::Result<Vec<u64>>>()?;
    Ok(PrimeLabelSet::new(primes)?)
}

fn run_basis(command: BasisCommand) -> Result<ExitCode, AppError> {
    match command {
        BasisCommand::Diag { n } => {
            let (family1, family2) = diagonal_bases(n)?;
            emit(&json!({"family1": family1, "family2": family2}))?;
            Ok(ExitCode::SUCCESS)
        }
        BasisCommand::Overlap { file, i, j } => {
            let vectors = load_vector_pool(&file)?;
            let fetch = |index: usize| {
                vectors.get(index).ok_or_else(|| {
                    Error::Domain(format!(
                        "vector index {index} out of range; the file holds {}",
                        vectors.len()
                    ))
                })
            };
            let value = overlap_sq(fetch(i)?, fetch(j)?)?;
            emit(&rational_value(&value))?;
            Ok(ExitCode::SUCCESS)
        }
        BasisCommand::Probs { state, partition } => {
            let vector: ExactVector = load(&state)?;
            let p: Partition = load(&partition)?;
            let probs = measurement_probabilities(&vector, &p)?;
            let rows: Vec<Value> = probs.iter().map(rational_value).collect();
            emit(&rows)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Accepts either a `basis diag` output ({"family1":…,"family2":…},
/// flattened family 1 first) or a bare JSON array of vectors.
fn load_vector_pool(path: &Path) -> Result<Vec<ExactVector>, AppError> {
    let text = read_input(path)?;
    let raw: Value = serde_json::from_str(&text).map_err(|source| AppError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let reparse = |value: Value| -> Result<Vec<ExactVector>, AppError> {
        serde_json::from_value(value).map_err(|source| AppError::Json {
            path: path.to_path_buf(),
            source,
        })
    };
    match raw {
        Value::Object(mut map) => {
            let (Some(one), Some(two)) = (map.remove("family1"), map.remove("family2")) else {
                return Err(Error::Parse(
                    "expected {\"family1\":…,\"family2\":…} or a JSON array of vectors".into(),
                )
                .into());
            };
            let mut vectors = reparse(one)?;
            vectors.extend(reparse(two)?);
            Ok(vectors)
        }
        other => reparse(other),
    }
}

fn run_search(command: SearchCommand) -> Result<ExitCode, AppError> {
    match command {
        SearchCommand::Plan { file } => {
            let frame: Frame = load(&file)?;
            let strategy = plan_straight_line(&frame)?;
            let report = strategy.report();
            emit(&json!({"report": report, "strategy": strategy}))?;
            Ok(ExitCode::SUCCESS)
        }
        SearchCommand::Optimal { file } => {
            let repertoire: Repertoire = load(&file)?;
            let (strategy, report) = optimal_strategy(&repertoire)?;
            emit(&json!({"report": report, "strategy": strategy}))?;
            Ok(ExitCode::SUCCESS)
        }
        SearchCommand::Eval { file, hidden } => {
            let strategy: nit_core::Strategy = load(&file)?;
            let transcript = strategy.evaluate(StateIndex::new(hidden)?)?;
            emit(&transcript)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// --- bundled worked examples -----------------------------------------------

struct Check {
    name: &'static str,
    run: fn() -> nit_core::Result<bool>,
}

fn state(v: u32) -> StateIndex {
    StateIndex::new(v).expect("demo states are positive")
}

fn rows_partition() -> Partition {
    Partition::from_blocks(9, [[1u32, 2, 3], [4, 5, 6], [7, 8, 9]]).expect("static blocks")
}

fn cols_partition() -> Partition {
    Partition::from_blocks(9, [[1u32, 4, 7], [2, 5, 8], [3, 6, 9]]).expect("static blocks")
}

fn entangled_frame() -> nit_core::Result<Frame> {
    Frame::new(
        3,
        2,
        vec![
            Partition::from_blocks(9, [[1u32, 5, 9], [2, 6, 7], [3, 4, 8]])?,
            Partition::from_blocks(9, [[1u32, 6, 8], [2, 4, 9], [3, 5, 7]])?,
        ],
    )
}

fn quoted_cycle() -> nit_core::Result<Permutation> {
    Permutation::from_cycles("(1)(2,9,3,5)(4,6,7,8)", 9)
}

fn diag_i64(entries: &[i64]) -> nit_core::Result<DiagonalOperator> {
    DiagonalOperator::from_entries(entries.iter().map(|&v| BigInt::from(v)).collect())
}

fn third_trit_labels() -> nit_core::Result<Vec<PrimeLabelSet>> {
    Ok(vec![
        PrimeLabelSet::new(vec![2, 3, 5])?,
        PrimeLabelSet::new(vec![7, 11, 13])?,
    ])
}

fn demo_checks() -> Vec<Check> {
    vec![
        Check {
            name: "coordinate-frame-3-2",
            run: || {
                let frame = canonical_frame(3, 2)?;
                Ok(frame.partitions() == [rows_partition(), cols_partition()])
            },
        },
        Check {
            name: "single-system-frame",
            run: || {
                let frame = canonical_frame(3, 1)?;
                let singletons =
                    Partition::from_blocks(3, [[1u32], [2], [3]]).expect("static blocks");
                Ok(frame.partitions() == [singletons])
            },
        },
        Check {
            name: "joint-measurement-discrete",
            run: || Ok(canonical_frame(3, 2)?.meet_all() == Partition::discrete(9)),
        },
        Check {
            name: "block-conjunction-pins-state",
            run: || Ok(canonical_frame(3, 2)?.conjunct(&[0, 2])? == vec![state(3)]),
        },
        Check {
            name: "coordinate-frame-separates",
            run: || Ok(canonical_frame(3, 2)?.is_separating()),
        },
        Check {
            name: "cycle-carries-entangled-frame-to-coordinate-frame",
            run: || {
                let moved = entangled_frame()?.apply_permutation(&quoted_cycle()?)?;
                Ok(moved == canonical_frame(3, 2)?)
            },
        },
        Check {
            name: "transporter-list-contains-quoted-cycle",
            run: || {
                let list = mapping_permutations(&entangled_frame()?, &canonical_frame(3, 2)?)?;
                Ok(list.contains(&quoted_cycle()?))
            },
        },
        Check {
            name: "rows-read-first-coordinate",
            run: || {
                Ok(classify_partition(&rows_partition(), 3, 2)?
                    == Classification::Local {
                        particle: 1,
                        relabeling: vec![0, 1, 2],
                    })
            },
        },
        Check {
            name: "diagonal-partition-is-entangled",
            run: || {
                let p = Partition::from_blocks(9, [[1u32, 5, 9], [2, 6, 7], [3, 4, 8]])?;
                Ok(classify_partition(&p, 3, 2)? == Classification::Nonlocal)
            },
        },
        Check {
            name: "columns-read-second-coordinate",
            run: || {
                Ok(classify_partition(&cols_partition(), 3, 2)?
                    == Classification::Local {
                        particle: 2,
                        relabeling: vec![0, 1, 2],
                    })
            },
        },
        Check {
            name: "row-operator-prime-labels",
            run: || {
                let op =
                    operator_from_partition(&rows_partition(), &PrimeLabelSet::new(vec![2, 3, 5])?)?;
                Ok(op == diag_i64(&[2, 2, 2, 3, 3, 3, 5, 5, 5])?)
            },
        },
        Check {
            name: "unbalanced-operator-prime-labels",
            run: || {
                let p = Partition::from_blocks(
                    9,
                    vec![vec![1u32], vec![2, 3], vec![4, 5, 6, 7, 8, 9]],
                )?;
                let op = operator_from_partition(&p, &PrimeLabelSet::new(vec![2, 3, 5])?)?;
                Ok(op == diag_i64(&[2, 3, 3, 5, 5, 5, 5, 5, 5])?)
            },
        },
        Check {
            name: "level-sets-recover-rows",
            run: || {
                let op = diag_i64(&[2, 2, 2, 3, 3, 3, 5, 5, 5])?;
                Ok(partition_from_operator(&op) == rows_partition())
            },
        },
        Check {
            name: "coordinate-operator-pair",
            run: || {
                let ops = canonical_nit_operators(3, 2, &third_trit_labels()?)?;
                Ok(ops
                    == vec![
                        diag_i64(&[2, 2, 2, 3, 3, 3, 5, 5, 5])?,
                        diag_i64(&[7, 11, 13, 7, 11, 13, 7, 11, 13])?,
                    ])
            },
        },
        Check {
            name: "context-product-distinct-spectrum",
            run: || {
                let ops = canonical_nit_operators(3, 2, &third_trit_labels()?)?;
                let context = context_operator(&ops)?;
                Ok(context == diag_i64(&[14, 22, 26, 21, 33, 39, 35, 55, 65])?
                    && context.has_distinct_spectrum())
            },
        },
        Check {
            name: "tuple-index-endpoints",
            run: || {
                Ok(index_from_tuple(&[0, 0], 3, 2)? == state(1)
                    && index_from_tuple(&[2, 2], 3, 2)? == state(9))
            },
        },
        Check {
            name: "standard-basis-unit-vectors",
            run: || {
                let basis = standard_basis(3, 2)?;
                if basis.len() != 9 {
                    return Ok(false);
                }
                for (index, vector) in basis.vectors().iter().enumerate() {
                    if *vector != ExactVector::unit(9, state(index as u32 + 1))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            },
        },
        Check {
            name: "first-diagonal-family-support",
            run: || {
                let (family1, _) = diagonal_bases(3)?;
                let head = &family1.vectors()[0];
                Ok(head.support() == vec![state(1), state(5), state(9)]
                    && *head.norm_sq() == BigInt::from(3))
            },
        },
        Check {
            name: "second-diagonal-family-support",
            run: || {
                let (_, family2) = diagonal_bases(3)?;
                Ok(family2.vectors()[0].support() == vec![state(1), state(6), state(8)])
            },
        },
        Check {
            name: "first-family-supports-disjoint",
            run: || {
                let (family1, _) = diagonal_bases(3)?;
                Ok(family1.vectors()[0].dot(&family1.vectors()[1])? == BigInt::from(0))
            },
        },
        Check {
            name: "cross-family-heads-share-one-product-state",
            run: || {
                let (family1, family2) = diagonal_bases(3)?;
                let expected = BigRational::new(BigInt::from(1), BigInt::from(9));
                Ok(family1.vectors()[0].dot(&family2.vectors()[0])? == BigInt::from(1)
                    && overlap_sq(&family1.vectors()[0], &family2.vectors()[0])? == expected)
            },
        },
        Check {
            name: "family-refines-entangled-partition",
            run: || {
                let (family1, _) = diagonal_bases(3)?;
                let p = Partition::from_blocks(9, [[1u32, 5, 9], [2, 6, 7], [3, 4, 8]])?;
                match basis_refines(family1.vectors(), &p)? {
                    RefineOutcome::Refines { mut block_of_vector } => {
                        block_of_vector.sort_unstable();
                        Ok(block_of_vector == vec![0, 1, 2])
                    }
                    RefineOutcome::Straddles { .. } => Ok(false),
                }
            },
        },
        Check {
            name: "unbiased-overlap-one-ninth",
            run: || {
                let (family1, family2) = diagonal_bases(3)?;
                let expected = BigRational::new(BigInt::from(1), BigInt::from(9));
                for u in family1.vectors() {
                    for v in family2.vectors() {
                        if overlap_sq(u, v)? != expected {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            },
        },
        Check {
            name: "unit-state-block-probabilities",
            run: || {
                let vector = ExactVector::unit(9, state(3))?;
                let probs = measurement_probabilities(&vector, &cols_partition())?;
                let zero = BigRational::from_integer(BigInt::from(0));
                let one = BigRational::from_integer(BigInt::from(1));
                Ok(probs == vec![zero.clone(), zero, one])
            },
        },
        Check {
            name: "entangled-state-uniform-probabilities",
            run: || {
                let (family1, _) = diagonal_bases(3)?;
                let entangled_cols =
                    Partition::from_blocks(9, [[1u32, 6, 8], [2, 4, 9], [3, 5, 7]])?;
                let probs = measurement_probabilities(&family1.vectors()[0], &entangled_cols)?;
                let third = BigRational::new(BigInt::from(1), BigInt::from(3));
                Ok(probs == vec![third.clone(), third.clone(), third])
            },
        },
        Check {
            name: "straight-line-depth-two",
            run: || {
                let strategy = plan_straight_line(&canonical_frame(3, 2)?)?;
                let report = strategy.report();
                Ok(report.worst_case == WorstCase::Depth(2) && report.residual.is_empty())
            },
        },
        Check {
            name: "optimal-worst-and-expected-two",
            run: || {
                let repertoire = Repertoire::from_frame(&canonical_frame(3, 2)?);
                let (_, report) = optimal_strategy(&repertoire)?;
                Ok(report.worst_case == WorstCase::Depth(2)
                    && report.expected == BigRational::from_integer(BigInt::from(2)))
            },
        },
        Check {
            name: "two-questions-identify-state-3",
            run: || {
                let strategy = plan_straight_line(&canonical_frame(3, 2)?)?;
                let transcript = strategy.evaluate(state(3))?;
                let blocks: Vec<(usize, usize)> = transcript
                    .steps
                    .iter()
                    .map(|step| (step.question, step.block))
                    .collect();
                Ok(blocks == vec![(0, 0), (1, 2)]
                    && transcript.outcome
                        == Outcome::Identified {
                            identified: state(3),
                        })
            },
        },
    ]
}

fn run_demo() -> Result<ExitCode, AppError> {
    let mut rows = Vec::new();
    let mut all_hold = true;
    for check in demo_checks() {
        let row = match (check.run)() {
            Ok(true) => json!({"holds": true, "name": check.name}),
            Ok(false) => {
                all_hold = false;
                json!({"holds": false, "name": check.name})
            }
            Err(err) => {
                all_hold = false;
                json!({"error": err.to_string(), "holds": false, "name": check.name})
            }
        };
        rows.push(row);
    }
    emit(&json!({"all_hold": all_hold, "checks": rows}))?;
    Ok(if all_hold {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
