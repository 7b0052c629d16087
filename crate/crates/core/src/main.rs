use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use logcirc::classgrp::{self, LogClassOptions};
use logcirc::report::{self, Settings, Suite};
use logcirc::{cyclo, ladic, units, AbelianField, CycloElement, Error, FieldSpec, Limits, Result};

#[derive(Parser, Debug)]
#[command(name = "logcirc", version, about = "Logarithmic class groups and circular units of real abelian fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Odd primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<u64>>,
    /// ℓ-adic precision.
    #[arg(long)]
    m: Option<u32>,
    /// Real quadratic fields Q(√d), comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u64>>,
    /// Conductor, together with --H.
    #[arg(long)]
    f: Option<u64>,
    /// Generators of the fixing subgroup of (Z/fZ)^×.
    #[arg(long = "H", value_delimiter = ',')]
    h: Option<Vec<u64>>,
    /// Sweep every real abelian field of conductor up to this bound.
    #[arg(long)]
    fmax: Option<u64>,
    #[arg(long)]
    degmax: Option<usize>,
    /// File with one field spec per line.
    #[arg(long)]
    fields: Option<PathBuf>,
    /// Files of `field | element` lines to test as logarithmic units.
    #[arg(long)]
    units: Option<Vec<PathBuf>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Candidates per auxiliary prime search.
    #[arg(long)]
    budget: Option<u64>,
    /// Random elements per field for the product formula.
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Galois group, decomposition data and subfields of a field.
    Field(Common),
    /// The circular number η_F.
    Eta(Common),
    /// Logarithmic divisor of an element (η_F by default).
    Logdiv {
        #[command(flatten)]
        common: Common,
        /// Element as `f=..; num=[..]; den=..`.
        #[arg(long)]
        x: Option<String>,
    },
    /// ℓ-parts of Cl and Cl⁰.
    Clgroup(Common),
    /// The logarithmic class group C̃l.
    Logclgroup(Common),
    /// Run verification suites and write a JSON report.
    Verify {
        /// One of eta-units, norm-identities, scolie, product-formula,
        /// lemma-dec, car-ranks, tpc, cor-cp, solomon, all; comma separated.
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn settings(&self) -> Result<Settings> {
        let flags = Settings {
            ell: self.ell.clone(),
            m: self.m,
            d: self.d.clone(),
            f: self.f,
            h: self.h.clone(),
            fmax: self.fmax,
            degmax: self.degmax,
            fields: self.fields.clone(),
            units: self.units.clone(),
            seed: self.seed,
            out: self.out.clone(),
            budget: self.budget,
            samples: self.samples,
            threads: self.threads,
        };
        let file = match &self.config {
            Some(p) => Settings::from_config_file(p)?,
            None => Settings::default(),
        };
        Ok(file.merge(flags))
    }

    fn single_field(&self) -> Result<(AbelianField, Settings)> {
        let s = self.settings()?;
        let specs = s.field_specs()?;
        let [spec]: [FieldSpec; 1] = specs
            .try_into()
            .map_err(|_| Error::InvalidInput("give exactly one field with --d or --f/--H".into()))?;
        Ok((spec.build(Limits::default())?, s))
    }
}

fn ell_and_m(s: &Settings) -> Result<(u64, u32)> {
    let cfg = s.resolve()?;
    match cfg.ells.as_slice() {
        [ell] => Ok((*ell, cfg.m)),
        _ => Err(Error::InvalidInput("give a single --ell".into())),
    }
}

fn cmd_field(c: &Common) -> Result<i32> {
    let (k, s) = c.single_field()?;
    println!("field {k}: conductor {}, degree {}", k.conductor(), k.degree());
    let g: Vec<String> = k.galois_group().iter().map(|x| format!("σ_{}", x.residue)).collect();
    println!("G = {{{}}}", g.join(", "));
    if let Some(ells) = &s.ell {
        for &ell in ells {
            let dec = k.decomposition_data(ell);
            println!(
                "ℓ = {ell}: g = {}, e = {}, f = {}, F° = {}",
                dec.places_above, dec.ramification_index, dec.residue_degree, dec.fixed_field
            );
        }
    }
    for sub in k.subfield_lattice() {
        println!("subfield {sub} (degree {})", sub.degree());
    }
    Ok(0)
}

fn cmd_eta(c: &Common) -> Result<i32> {
    let (k, _) = c.single_field()?;
    let c = cyclo::eta_cyclic(&k)?;
    println!("{} (f={})", cyclo::format_terms(&c), k.conductor());
    Ok(0)
}

fn cmd_logdiv(c: &Common, x: Option<&str>) -> Result<i32> {
    let (k, s) = c.single_field()?;
    let (ell, m) = ell_and_m(&s)?;
    let x: CycloElement = match x {
        Some(r) => r.parse()?,
        None => cyclo::eta(&k)?,
    };
    let d = ladic::log_divisor(&k, &x, ell, m)?;
    for (pl, v) in &d.finite {
        println!("{pl}: {v}");
    }
    for (pl, v) in &d.at_ell {
        println!("{pl}: {v}");
    }
    println!("degree {} (precision {})", d.degree(&k)?, d.prec);
    println!("logarithmic unit: {}", units::is_log_unit(&k, &x, ell, m)?);
    Ok(0)
}

fn cmd_clgroup(c: &Common) -> Result<i32> {
    let (k, s) = c.single_field()?;
    let (ell, m) = ell_and_m(&s)?;
    let g = classgrp::class_group(&k, ell, m)?;
    if let Some(h) = g.class_number {
        println!("class number {h}");
    }
    println!("Cl  = {}", g.cl);
    println!("Cl0 = {}", g.cl0);
    Ok(0)
}

fn cmd_logclgroup(c: &Common) -> Result<i32> {
    let (k, s) = c.single_field()?;
    let (ell, m) = ell_and_m(&s)?;
    let g = classgrp::log_class_group(&k, ell, m, LogClassOptions::default())?;
    println!("{}", g.to_string_short());
    Ok(0)
}

fn cmd_verify(suite: &str, c: &Common) -> Result<i32> {
    let suites = Suite::parse_selection(suite)?;
    let s = c.settings()?;
    let cfg = s.resolve()?;
    let rep = match s.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(|| report::run(&cfg, &suites))?,
        None => report::run(&cfg, &suites)?,
    };
    for r in rep.records.iter().filter(|r| r.exit_code() != 0) {
        eprintln!("{} {} {}: {:?} {}", r.suite, r.field, r.check, r.status, r.detail);
    }
    for (name, n) in &rep.summary {
        println!(
            "{name}: {} pass, {} fail, {} skip, {} violation, {} error",
            n.pass, n.fail, n.skip, n.violation, n.error
        );
    }
    if let Some(path) = &s.out {
        std::fs::write(path, rep.to_json(true))?;
    }
    Ok(rep.exit_code())
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Field(c) => cmd_field(c),
        Command::Eta(c) => cmd_eta(c),
        Command::Logdiv { common, x } => cmd_logdiv(common, x.as_deref()),
        Command::Clgroup(c) => cmd_clgroup(c),
        Command::Logclgroup(c) => cmd_logclgroup(c),
        Command::Verify { suite, common } => cmd_verify(suite, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
