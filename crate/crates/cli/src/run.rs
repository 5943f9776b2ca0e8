//! Executes a [`RunConfig`] and renders its report.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use privdist_core::filtering::apply_filter_with;
use privdist_core::private_state::tensor_power_spec;
use privdist_core::state::derive_seed;
use privdist_core::{
    brute_force_eta, build_filters, build_private_state, cross_operator, ed_lower_bound,
    ef_certificate, overlap_for_pair, predict_outcome, random_density, random_unitary, sweep,
    BoundOptions, PrivateStateSpec, SweepKnob,
};
use serde::Serialize;

use crate::config::{
    BuildArgs, CertifyArgs, Command, GenArgs, Knob, MatrixKind, PairArgs, RunConfig, SpecArgs,
    SweepArgs,
};
use crate::formats::{read_matrix, read_spec, to_json_string, MatrixJson, SpecJson};
use crate::report::{
    Artifact, BoundJson, CertificateJson, DistillJson, EtaJson, GeneratedMatrix, GeneratedSpec,
    PairBoundJson, Report, SweepRowJson,
};

/// Exit status of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    CertificateFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::CertificateFailed => 2,
        }
    }
}

/// Rendered outputs of a run, not yet written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub status: Status,
    /// Report JSON with the embedded config.
    pub json: String,
    /// Plot data for `sweep`.
    pub csv: Option<String>,
    /// Extra files requested by the command (path, contents).
    pub side_files: Vec<(PathBuf, String)>,
}

fn render_artifact<T: Serialize>(config: &RunConfig, body: T) -> Result<String> {
    to_json_string(&Artifact { body, config })
}

fn render<T: Serialize>(config: &RunConfig, result: T) -> Result<String> {
    to_json_string(&Report { config, result })
}

pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let mut output = RunOutput {
        status: Status::Success,
        json: String::new(),
        csv: None,
        side_files: Vec::new(),
    };
    output.json = match &config.command {
        Command::Gen(args) => render_artifact(config, generate(config, args)?)?,
        Command::Build(args) => {
            let (result, state) = build(config, args)?;
            if let (Some(path), Some(state)) = (&args.state_out, state) {
                output.side_files.push((path.clone(), state));
            }
            render_artifact(config, result)?
        }
        Command::Eta(args) => render(config, eta(config, args)?)?,
        Command::Distill(args) => render(config, distill(config, args)?)?,
        Command::Bound(args) => render(config, bound(config, args)?)?,
        Command::Certify(args) => {
            let result = certify(config, args)?;
            if !result.passed {
                output.status = Status::CertificateFailed;
            }
            render(config, result)?
        }
        Command::Sweep(args) => {
            let rows = sweep_rows(config, args)?;
            output.csv = Some(sweep_csv(&rows)?);
            render(config, rows)?
        }
    };
    Ok(output)
}

/// Writes the outputs to `--out` (file or existing directory) or stdout.
pub fn write_outputs(config: &RunConfig, output: &RunOutput) -> Result<()> {
    for (path, contents) in &output.side_files {
        fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let name = config.command.name();
    match &config.global.out {
        None => print!("{}", output.csv.as_ref().unwrap_or(&output.json)),
        Some(dir) if dir.is_dir() => {
            write_file(&dir.join(format!("{name}.json")), &output.json)?;
            if let Some(csv) = &output.csv {
                write_file(&dir.join(format!("{name}.csv")), csv)?;
            }
        }
        Some(file) => write_file(file, output.csv.as_ref().unwrap_or(&output.json))?,
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn bound_options(config: &RunConfig) -> BoundOptions {
    BoundOptions {
        optimizer: config.global.optimizer(),
        tolerances: config.global.tolerances(),
    }
}

fn load_spec(config: &RunConfig, path: &Path) -> Result<PrivateStateSpec> {
    read_spec(path, &config.global.tolerances())
}

fn generate(config: &RunConfig, args: &GenArgs) -> Result<GeneratedMatrix> {
    if args.dim == 0 {
        bail!("--dim must be at least 1");
    }
    let seed = config.global.seed;
    let matrix = match args.kind {
        MatrixKind::Unitary => {
            if args.rank.is_some() {
                bail!("--rank only applies to density matrices");
            }
            MatrixJson::from_matrix(random_unitary(args.dim, seed)?.matrix())
        }
        MatrixKind::Density => MatrixJson::from_state(&random_density(
            args.dim,
            args.rank.unwrap_or(args.dim),
            seed,
        )?),
    };
    Ok(GeneratedMatrix { matrix })
}

fn build(config: &RunConfig, args: &BuildArgs) -> Result<(GeneratedSpec, Option<String>)> {
    let shield_dims = match (args.parties, args.shield_dims.as_slice()) {
        (Some(n), [s]) => vec![*s; n],
        (Some(n), dims) if dims.len() != n => {
            bail!(
                "--parties {n} does not match {} shield dimensions",
                dims.len()
            )
        }
        (_, dims) => dims.to_vec(),
    };
    if args.d < 2 {
        bail!("--d must be at least 2");
    }
    let tol = config.global.tolerances();
    let seed = config.global.seed;
    let shield_dim: usize = shield_dims.iter().product();
    let shield = match &args.shield_file {
        Some(path) => read_matrix(path)?
            .to_state(&tol)
            .with_context(|| format!("{}: invalid shield state", path.display()))?,
        None => random_density(
            shield_dim,
            args.shield_rank.unwrap_or(shield_dim),
            derive_seed(seed, 0),
        )?,
    };
    let unitaries = if args.unitary_files.is_empty() {
        (0..args.d)
            .map(|i| random_unitary(shield_dim, derive_seed(seed, i as u64 + 1)))
            .collect::<privdist_core::Result<Vec<_>>>()?
    } else {
        if args.unitary_files.len() != args.d {
            bail!(
                "expected {} unitary files, got {}",
                args.d,
                args.unitary_files.len()
            );
        }
        args.unitary_files
            .iter()
            .map(|path| {
                read_matrix(path)?
                    .to_unitary()
                    .with_context(|| format!("{}: invalid unitary", path.display()))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let spec = PrivateStateSpec::new(args.d, shield_dims, unitaries, shield)?;
    let state = args
        .state_out
        .as_ref()
        .map(|_| to_json_string(&MatrixJson::from_state(build_private_state(&spec).rho())))
        .transpose()?;
    Ok((
        GeneratedSpec {
            spec: SpecJson::from_spec(&spec),
        },
        state,
    ))
}

fn pairs(spec: &PrivateStateSpec, args: &PairArgs) -> Result<Vec<(usize, usize)>> {
    let d = spec.d();
    if args.all_pairs {
        return Ok((0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .collect());
    }
    if args.i >= d || args.j >= d || args.i == args.j {
        bail!(
            "key pair ({}, {}) invalid for key dimension {d}",
            args.i,
            args.j
        );
    }
    Ok(vec![(args.i, args.j)])
}

fn eta(config: &RunConfig, args: &PairArgs) -> Result<Vec<EtaJson>> {
    let spec = load_spec(config, &args.spec)?;
    let opts = config.global.optimizer();
    pairs(&spec, args)?
        .into_iter()
        .map(|(i, j)| {
            let overlap = overlap_for_pair(&spec, i, j, &opts)?;
            let brute_force = match args.samples {
                Some(samples) => Some(brute_force_eta(
                    &cross_operator(&spec, i, j)?,
                    spec.shield_dims(),
                    samples,
                    config.global.seed,
                )?),
                None => None,
            };
            Ok(EtaJson::new(&overlap, brute_force))
        })
        .collect()
}

fn distill(config: &RunConfig, args: &PairArgs) -> Result<Vec<DistillJson>> {
    let spec = load_spec(config, &args.spec)?;
    let opts = bound_options(config);
    let state = build_private_state(&spec);
    pairs(&spec, args)?
        .into_iter()
        .map(|(i, j)| {
            let overlap = overlap_for_pair(&spec, i, j, &opts.optimizer)?;
            let filters = build_filters(&overlap)?;
            let outcome = apply_filter_with(&state, &filters, &opts.tolerances)?;
            let predicted = predict_outcome(&overlap);
            Ok(DistillJson::new(
                &overlap,
                &filters,
                &outcome,
                predicted,
                opts.tolerances.residual,
            ))
        })
        .collect()
}

fn bound(config: &RunConfig, args: &SpecArgs) -> Result<BoundJson> {
    let spec = load_spec(config, &args.spec)?;
    let report = ed_lower_bound(&spec, &bound_options(config));
    Ok(BoundJson {
        key_dim: report.key_dim,
        parties: report.parties,
        key_rate: report.key_rate,
        per_pair: report.per_pair.iter().map(PairBoundJson::new).collect(),
        best_pair: report.best_pair,
        best_paper_rate: report.best_paper_rate,
        best_verified_rate: report.best_verified_rate,
    })
}

fn certify(config: &RunConfig, args: &CertifyArgs) -> Result<CertificateJson> {
    let spec = load_spec(config, &args.spec)?;
    let spec = if args.tensor_power == 1 {
        spec
    } else {
        tensor_power_spec(&spec, args.tensor_power, args.dim_cap)?.0
    };
    let cert = ef_certificate(&spec, args.samples, config.global.seed)?;
    Ok(CertificateJson::new(&cert, args.tensor_power))
}

fn sweep_rows(config: &RunConfig, args: &SweepArgs) -> Result<Vec<SweepRowJson>> {
    let spec = load_spec(config, &args.spec)?;
    let knob = match args.knob {
        Knob::Depolarize => SweepKnob::Depolarize,
        Knob::Rank => SweepKnob::ShieldRank,
    };
    let rows = sweep(
        &spec,
        knob,
        &args.values,
        &bound_options(config),
        config.global.seed,
    )?;
    Ok(rows.iter().map(SweepRowJson::from).collect())
}

fn sweep_csv(rows: &[SweepRowJson]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["knob", "eta", "p", "paper_rate", "verified_rate"])?;
    for row in rows {
        writer.write_record(
            [row.knob, row.eta, row.p, row.paper_rate, row.verified_rate].map(|x| x.to_string()),
        )?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}
