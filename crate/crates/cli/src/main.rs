//! `tuhf`: inspect triangular UHF towers, their automorphisms and the
//! order on their Gelfand spaces.
//!
//! Exit status is 0 on success, 1 when the input is well formed but the
//! request fails mathematically, and 2 when an argument or input file
//! cannot be read or parsed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tuhf::automorphism::{self, AutoError, ShiftWord};
use tuhf::checks;
use tuhf::embedding::{
    self, ComplexUpperTriangular, EmbeddingDescriptor, EmbeddingError, EmbeddingOrder,
};
use tuhf::gelfand::{self, GelfandPoint, PointOrder};
use tuhf::partition::PartitionError;
use tuhf::tower::{load_tower, TowerError, TowerSpec};

#[derive(Debug, Parser)]
#[command(name = "tuhf", version, about = "Triangular UHF tower toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect or rewrite a tower file.
    #[command(subcommand)]
    Tower(TowerCommand),
    /// Rank d of the outer automorphism group ℤ^d.
    OutRank { file: PathBuf },
    /// Whether two alternating towers give isomorphic algebras.
    Iso { a: PathBuf, b: PathBuf },
    /// Recover the shift word of an automorphism from finite-level data.
    Factor {
        file: PathBuf,
        /// Auto-data file: `levels <m> <m'>` / `action <partition>` pairs.
        #[arg(long)]
        auto: PathBuf,
    },
    /// Finite-level actions of the shift automorphism for a prime.
    Shift {
        file: PathBuf,
        #[arg(short, long)]
        prime: u64,
        /// Inclusive level range `a..b`.
        #[arg(long, value_parser = parse_levels)]
        levels: (usize, usize),
    },
    /// Finite-level action of the automorphism with shift word `u/v`.
    Materialize {
        file: PathBuf,
        #[arg(long)]
        word: ShiftWord,
        #[arg(long, default_value_t = 1)]
        level: usize,
        /// Target level; defaults to the first level that can carry it.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Compose a word with itself and compare against the tower.
    Torsion {
        file: PathBuf,
        #[arg(long)]
        word: ShiftWord,
        #[arg(short, long, default_value_t = 2)]
        power: u32,
    },
    /// Regular embeddings between upper-triangular matrix algebras.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// The order on the Gelfand space.
    #[command(subcommand)]
    Gelfand(GelfandCommand),
    /// Normalizing partial isometries.
    #[command(subcommand)]
    Normalizer(NormalizerCommand),
    /// Property sweeps.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Subcommand)]
enum TowerCommand {
    /// Level dimensions and the supernatural pair.
    Show {
        file: PathBuf,
        /// Number of levels to list.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Equivalent tower with a single cycle descriptor.
    Normalize { file: PathBuf },
}

#[derive(Debug, Args)]
struct EmbedPair {
    /// Descriptor: `std <m>`, `nest <m>`, `alt <s> <t>` or `part <k_to> <partition>`.
    first: EmbeddingDescriptor,
    second: EmbeddingDescriptor,
    /// Source dimension of the first embedding.
    #[arg(short, long)]
    k: usize,
}

#[derive(Debug, Subcommand)]
enum EmbedCommand {
    /// `second ∘ first`, with `second` leaving the target of `first`.
    Compose(EmbedPair),
    /// Order of two embeddings with the same source.
    Compare(EmbedPair),
    /// `first ⊗ second`.
    Tensor {
        #[command(flatten)]
        pair: EmbedPair,
        /// Source dimension of the second embedding.
        #[arg(short, long)]
        j: usize,
    },
}

#[derive(Debug, Subcommand)]
enum GelfandCommand {
    /// Compare two points given by their first coordinates.
    Cmp {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<usize>,
        /// Declared tail of x beyond the given coordinates.
        #[arg(long, default_value = "0")]
        x_tail: String,
        /// Declared tail of y beyond the given coordinates.
        #[arg(long, default_value = "0")]
        y_tail: String,
    },
}

#[derive(Debug, Subcommand)]
enum NormalizerCommand {
    /// Split V = D·W into a diagonal unitary and a partial permutation.
    Split {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Run every property sweep that applies to the tower.
    All {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// Why a command failed; decides the exit status.
#[derive(Debug)]
enum Failure {
    Input(String),
    Domain(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<TowerError> for Failure {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::Parse { .. } | TowerError::InvalidDescriptor { .. } => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<EmbeddingError> for Failure {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::InvalidDescriptor(_) | EmbeddingError::Partition(PartitionError::Parse(_)) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<AutoError> for Failure {
    fn from(e: AutoError) -> Self {
        match e {
            AutoError::Parse { .. } => Failure::Input(e.to_string()),
            AutoError::Tower(t) => t.into(),
            AutoError::Embedding(t) => t.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<gelfand::GelfandError> for Failure {
    fn from(e: gelfand::GelfandError) -> Self {
        match e {
            gelfand::GelfandError::Tower(t) => t.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn parse_levels(text: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected a level range `a..b`, got `{text}`");
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(format!("level range must satisfy 1 ≤ a ≤ b, got `{text}`"));
    }
    Ok((a, b))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_tower(path: &Path) -> Result<TowerSpec, Failure> {
    load_tower(&read(path)?).map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        Failure::Domain(m) => Failure::Domain(format!("{}: {m}", path.display())),
    })
}

fn tower_show(tower: &TowerSpec, depth: usize) -> Outcome {
    let mut out = String::new();
    let (s1, t1) = tower
        .first_split()
        .map_or(("-".to_string(), "-".to_string()), |(s, t)| (s.to_string(), t.to_string()));
    writeln!(out, "k1 {} (s1 = {s1}, t1 = {t1})", tower.k1()).unwrap();
    for n in 1..=depth.max(1) {
        let dims = tower.level_dims(n)?;
        write!(out, "level {n}: k = {}", dims.k).unwrap();
        if let (Some(s), Some(t)) = (&dims.s, &dims.t) {
            write!(out, ", s = {s}, t = {t}").unwrap();
        }
        writeln!(out, ", step {}", tower.descriptor(n)).unwrap();
    }
    match tower.supernatural_pair() {
        Ok((s, t)) => {
            writeln!(out, "s_phi = {s}").unwrap();
            writeln!(out, "t_phi = {t}").unwrap();
        }
        Err(TowerError::NotAlternatingTower) => writeln!(out, "supernatural pair: not alternating").unwrap(),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn order_word(order: PointOrder) -> &'static str {
    match order {
        PointOrder::Less => "less",
        PointOrder::Equal => "equal",
        PointOrder::Greater => "greater",
        PointOrder::Incomparable => "incomparable",
    }
}

fn gelfand_cmp(tower: &TowerSpec, x: GelfandPoint, y: GelfandPoint) -> Outcome {
    let lex = gelfand::gelfand_compare(tower, &x, &y)?;
    let proj = gelfand::gelfand_compare_via_projections(tower, &x, &y)?;
    let mut out = String::new();
    writeln!(out, "lexicographic: {}", order_word(lex)).unwrap();
    writeln!(out, "projections: {}", order_word(proj)).unwrap();
    match gelfand::relation_member(tower, &x, &y, x.depth())? {
        Some(w) => writeln!(out, "witness: level {}, e_({},{})", w.depth, w.i, w.j).unwrap(),
        None => writeln!(out, "witness: none").unwrap(),
    }
    Ok(out)
}

fn format_complex(re: f64, im: f64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    let (re, im) = (clean(re), clean(im));
    if im < 0.0 {
        format!("{re:.6}-{:.6}i", -im)
    } else {
        format!("{re:.6}+{im:.6}i")
    }
}

fn normalizer_split(v: &ComplexUpperTriangular) -> Outcome {
    let (d, w) = embedding::normalizer_split(v)?;
    let mut out = String::new();
    writeln!(out, "dim {}", v.dim()).unwrap();
    let phases: Vec<String> = d.phases().iter().map(|z| format_complex(z.re, z.im)).collect();
    writeln!(out, "D = diag({})", phases.join(", ")).unwrap();
    let pairs: Vec<String> = w.pairs().map(|(r, c)| format!("({},{})", r + 1, c + 1)).collect();
    writeln!(out, "W = {{{}}}", pairs.join(", ")).unwrap();
    Ok(out)
}

fn check_all(tower: &TowerSpec, seed: u64, cases: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reports = checks::run_all(tower, &mut rng, cases);
    let mut out = String::new();
    for r in &reports {
        writeln!(out, "{r}").unwrap();
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        print!("{out}");
        return Err(Failure::Domain(format!("{failed} of {} sweeps failed", reports.len())));
    }
    writeln!(out, "all {} sweeps passed", reports.len()).unwrap();
    Ok(out)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Tower(TowerCommand::Show { file, depth }) => tower_show(&read_tower(&file)?, depth),
        Command::Tower(TowerCommand::Normalize { file }) => Ok(read_tower(&file)?.normalized()?.to_string()),
        Command::OutRank { file } => Ok(format!("{}\n", automorphism::out_rank(&read_tower(&file)?)?)),
        Command::Iso { a, b } => {
            let witness = automorphism::alternating_iso(&read_tower(&a)?, &read_tower(&b)?)?;
            Ok(match witness {
                Some(r) => format!("isomorphic, r = {r}\n"),
                None => "not isomorphic\n".to_string(),
            })
        }
        Command::Factor { file, auto } => {
            let tower = read_tower(&file)?;
            let data = automorphism::parse_auto_data(&read(&auto)?)?;
            Ok(automorphism::factor_automorphism(&tower, &data)?.to_string())
        }
        Command::Shift { file, prime, levels } => {
            let data = automorphism::shift_auto_levels(&read_tower(&file)?, prime, levels.0..=levels.1)?;
            Ok(automorphism::format_auto_data(&data))
        }
        Command::Materialize { file, word, level, to } => {
            let tower = read_tower(&file)?;
            Ok(automorphism::materialize(&tower, &word, level, to)?.to_string())
        }
        Command::Torsion { file, word, power } => {
            let r = automorphism::torsion_report(&read_tower(&file)?, &word, power)?;
            let levels: Vec<String> = r.levels.iter().map(usize::to_string).collect();
            Ok(format!(
                "word {word}, power {power}\nlevels {}\nmatches tower: {}\ncompared as: {}\n{}\n",
                levels.join(" -> "),
                if r.matches_tower { "yes" } else { "no" },
                if r.materialized { "partitions" } else { "splits" },
                if r.power_is_identity { "identity" } else { "not the identity" },
            ))
        }
        Command::Embed(EmbedCommand::Compose(EmbedPair { first, second, k })) => {
            let inner = first.embedding(k)?;
            let outer = second.embedding(inner.k_to())?;
            let c = embedding::compose(&outer, &inner)?;
            Ok(format!("T_{} -> T_{}\n{}\n", c.k_from(), c.k_to(), c.diag()))
        }
        Command::Embed(EmbedCommand::Compare(EmbedPair { first, second, k })) => {
            let order = embedding::compare_embeddings(&first.embedding(k)?, &second.embedding(k)?)?;
            Ok(match order {
                EmbeddingOrder::Less => "less\n",
                EmbeddingOrder::EqualOnProjections => "equal on projections\n",
                EmbeddingOrder::Greater => "greater\n",
            }
            .to_string())
        }
        Command::Embed(EmbedCommand::Tensor { pair, j }) => {
            let t = embedding::tensor_embed(&pair.first.embedding(pair.k)?, &pair.second.embedding(j)?);
            Ok(format!("T_{} -> T_{}\n{}\n", t.k_from(), t.k_to(), t.diag()))
        }
        Command::Gelfand(GelfandCommand::Cmp { file, x, y, x_tail, y_tail }) => {
            let tower = read_tower(&file)?;
            let x = GelfandPoint::new(&tower, x, x_tail)?;
            let y = GelfandPoint::new(&tower, y, y_tail)?;
            gelfand_cmp(&tower, x, y)
        }
        Command::Normalizer(NormalizerCommand::Split { matrix }) => {
            let v: ComplexUpperTriangular = read(&matrix)?.parse()?;
            normalizer_split(&v)
        }
        Command::Check(CheckCommand::All { file, seed, cases }) => check_all(&read_tower(&file)?, seed, cases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
