//! Command implementations: each produces the text to emit and an exit code.

use std::fmt::Write as _;
use std::path::PathBuf;

use ebac_core::admission::{admission_region, decide, region_tradeoff_table};
use ebac_core::bandwidth::{
    aggregate_buffer, aggregate_eb, delay_for_buffer, effective_bandwidth, equivalent_capacity,
};
use ebac_core::rational::int;
use ebac_core::simtrace::{fifo_server, greedy_source, validate_scenario, BoundViolation};
use ebac_core::{AdmissionError, Extended, LinkConfig, Rational, SimReport, TSpec};
use num_traits::Signed;
use serde::Serialize;

use crate::args::{Command, Common, Format};
use crate::number::{render, render_extended, Quantity};
use crate::scenario::{bits_to_kb, bps_to_mbps, kb_to_bits, mbps_to_bps, Scenario};
use crate::CliError;

/// Exit code for an accepted or successful command.
pub const EXIT_OK: u8 = 0;
/// Exit code for usage and domain errors.
pub const EXIT_ERROR: u8 = 2;
/// Exit code for a rejected admission request.
pub const EXIT_REJECTED: u8 = 3;
/// Exit code for a simulation that broke an analytic bound.
pub const EXIT_VIOLATION: u8 = 4;

/// Rendered result of a command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub exit: u8,
    /// Extra files requested by the command, written alongside `text`.
    pub files: Vec<(PathBuf, String)>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            exit: EXIT_OK,
            files: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct Units {
    rate: &'static str,
    data: &'static str,
    time: &'static str,
}

const UNITS: Units = Units {
    rate: "Mb/s",
    data: "kb",
    time: "s",
};

fn rate_q(bps: &Extended) -> Quantity {
    Quantity::extended(&scale_extended(bps, bps_to_mbps))
}

fn data_q(bits: &Rational) -> Quantity {
    Quantity::finite(&bits_to_kb(bits))
}

fn time_q(s: &Rational) -> Quantity {
    Quantity::finite(s)
}

fn scale_extended(value: &Extended, f: fn(&Rational) -> Rational) -> Extended {
    match value {
        Extended::Finite(v) => Extended::Finite(f(v)),
        Extended::Infinite => Extended::Infinite,
    }
}

fn mbps_text(bps: &Extended) -> String {
    match bps {
        Extended::Finite(v) => format!("{} Mb/s", render(&bps_to_mbps(v))),
        Extended::Infinite => "unbounded".to_owned(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Usage(format!("`{command}` does not support --format {format:?}").to_lowercase())
}

/// Scenario plus command-line overrides, in bits and seconds.
pub struct Context {
    pub scenario: Scenario,
    pub counts: Vec<u64>,
    pub delay: Rational,
    pub capacity: Rational,
    pub buffer: Option<Rational>,
}

impl Context {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        Context::with_scenario(Scenario::load(&common.scenario)?, common)
    }

    pub fn with_scenario(scenario: Scenario, common: &Common) -> Result<Self, CliError> {
        let counts = match &common.counts {
            Some(c) if c.len() != scenario.catalog().len() => {
                return Err(CliError::Usage(format!(
                    "--counts has {} entries but the scenario has {} classes",
                    c.len(),
                    scenario.catalog().len()
                )))
            }
            Some(c) => c.clone(),
            None => scenario.counts(),
        };
        let delay = common.delay.clone().unwrap_or_else(|| scenario.delay());
        if delay.is_negative() {
            return Err(CliError::Usage("--D must be non-negative".into()));
        }
        let capacity = common
            .capacity
            .as_ref()
            .map(mbps_to_bps)
            .unwrap_or_else(|| scenario.capacity());
        if !capacity.is_positive() {
            return Err(CliError::Usage("--C must be positive".into()));
        }
        let buffer = common.buffer.as_ref().map(kb_to_bits).or_else(|| scenario.buffer());
        if buffer.as_ref().is_some_and(Signed::is_negative) {
            return Err(CliError::Usage("--B must be non-negative".into()));
        }
        Ok(Context {
            scenario,
            counts,
            delay,
            capacity,
            buffer,
        })
    }

    fn link(&self) -> Result<LinkConfig, CliError> {
        Ok(LinkConfig::new(self.capacity.clone(), self.delay.clone())?)
    }

    fn catalog(&self) -> &[TSpec] {
        self.scenario.catalog()
    }

    /// Class names in the order the aggregate's breakpoints are indexed:
    /// ascending `Γ`, ties by burst then packet size.
    fn breakpoint_order(&self) -> Vec<String> {
        let catalog = self.catalog();
        let mut order: Vec<usize> = (0..catalog.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&catalog[a], &catalog[b]);
            x.gamma()
                .cmp(&y.gamma())
                .then_with(|| x.burst().cmp(y.burst()))
                .then_with(|| x.max_packet().cmp(y.max_packet()))
        });
        let names = self.scenario.names();
        order.into_iter().map(|i| names[i].to_owned()).collect()
    }
}

/// `Σ nᵢ·e_D(αᵢ)`: the rate reserved if every flow were served separately.
pub fn sum_of_individual_eb(catalog: &[TSpec], counts: &[u64], delay: &Rational) -> Result<Extended, CliError> {
    let mut total = Extended::zero();
    for (spec, n) in catalog.iter().zip(counts) {
        if *n == 0 {
            continue;
        }
        let single = effective_bandwidth(&spec.curve(), delay)?;
        total = total.add(&match single {
            Extended::Finite(v) => Extended::Finite(v * int(*n as i64)),
            Extended::Infinite => Extended::Infinite,
        });
    }
    Ok(total)
}

pub fn execute(command: &Command) -> Result<Output, CliError> {
    let ctx = Context::new(command.common())?;
    execute_with(command, &ctx)
}

pub fn execute_with(command: &Command, ctx: &Context) -> Result<Output, CliError> {
    let format = command.common().format;
    match command {
        Command::Eb(_) => cmd_eb(ctx, format.unwrap_or(Format::Text)),
        Command::Ec(_) => cmd_ec(ctx, format.unwrap_or(Format::Text)),
        Command::Buffer(_) => cmd_buffer(ctx, format.unwrap_or(Format::Text)),
        Command::Admit(_) => cmd_admit(ctx, format.unwrap_or(Format::Text)),
        Command::SweepD {
            d_min, d_max, steps, ..
        } => {
            let rows = sweep_d(ctx, d_min, d_max, *steps)?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => Ok(Output::ok(sweep_csv(&rows))),
                Format::Json => Ok(Output::ok(sweep_json(&rows))),
                other => Err(unsupported(other, "sweep-d")),
            }
        }
        Command::Region {
            fixed, pairwise, cap, ..
        } => cmd_region(ctx, fixed.as_deref(), *pairwise, *cap, format.unwrap_or(Format::Csv)),
        Command::Simulate { dt, horizon, trace, .. } => cmd_simulate(
            ctx,
            dt.as_ref(),
            horizon.as_ref(),
            trace.clone(),
            format.unwrap_or(Format::Json),
        ),
    }
}

#[derive(Serialize)]
struct EbReport {
    units: Units,
    #[serde(rename = "D")]
    delay: Quantity,
    counts: Vec<u64>,
    gamma: Vec<Quantity>,
    breakpoint_order: Vec<String>,
    aggregate_eb: Quantity,
    sum_eb_individual: Quantity,
    candidates: Vec<Quantity>,
    thresholds: Vec<Quantity>,
    regime: usize,
    flattening_delay: Quantity,
}

fn cmd_eb(ctx: &Context, format: Format) -> Result<Output, CliError> {
    let mix = ctx.scenario.mix(&ctx.counts, ctx.delay.clone())?;
    let profile = aggregate_eb(&mix)?;
    let separate = sum_of_individual_eb(ctx.catalog(), &ctx.counts, &ctx.delay)?;
    let thresholds: Vec<Quantity> = profile.thresholds.iter().map(Quantity::extended).collect();
    match format {
        Format::Json => Ok(Output::ok(json(&EbReport {
            units: UNITS,
            delay: time_q(&ctx.delay),
            counts: ctx.counts.clone(),
            gamma: ctx.catalog().iter().map(|s| time_q(&s.gamma())).collect(),
            breakpoint_order: ctx.breakpoint_order(),
            aggregate_eb: rate_q(&profile.selected_eb),
            sum_eb_individual: rate_q(&separate),
            candidates: profile.candidates.iter().map(rate_q).collect(),
            thresholds,
            regime: profile.regime_index,
            flattening_delay: Quantity::extended(profile.flattening_delay()),
        }))),
        Format::Text => {
            let mut text = String::new();
            writeln!(text, "D = {} s", render(&ctx.delay)).unwrap();
            writeln!(text, "aggregate EB = {}", mbps_text(&profile.selected_eb)).unwrap();
            writeln!(text, "sum of individual EB = {}", mbps_text(&separate)).unwrap();
            writeln!(
                text,
                "flattening delay = {} s",
                render_extended(profile.flattening_delay())
            )
            .unwrap();
            for (k, c) in profile.candidates.iter().enumerate() {
                let mark = if k == profile.regime_index { "  <- selected" } else { "" };
                writeln!(text, "e{} = {}{mark}", k + 1, mbps_text(c)).unwrap();
            }
            for (k, t) in profile.thresholds.iter().enumerate() {
                writeln!(text, "tau{} = {} s", k + 1, render_extended(t)).unwrap();
            }
            Ok(Output::ok(text))
        }
        other => Err(unsupported(other, "eb")),
    }
}

#[derive(Serialize)]
struct EcReport {
    units: Units,
    #[serde(rename = "B")]
    buffer: Quantity,
    counts: Vec<u64>,
    equivalent_capacity: Quantity,
    delay_at_capacity: Quantity,
}

fn cmd_ec(ctx: &Context, format: Format) -> Result<Output, CliError> {
    let buffer = ctx
        .buffer
        .clone()
        .ok_or_else(|| CliError::Usage("`ec` needs a buffer: pass --B or set link.B".into()))?;
    let mix = ctx.scenario.mix(&ctx.counts, ctx.delay.clone())?;
    let alpha = mix.aggregate_curve();
    let capacity = equivalent_capacity(&alpha, &buffer)?;
    let delay = delay_for_buffer(&alpha, &buffer)?;
    match format {
        Format::Json => Ok(Output::ok(json(&EcReport {
            units: UNITS,
            buffer: data_q(&buffer),
            counts: ctx.counts.clone(),
            equivalent_capacity: rate_q(&capacity),
            delay_at_capacity: time_q(&delay),
        }))),
        Format::Text => Ok(Output::ok(format!(
            "B = {} kb\nequivalent capacity = {}\ndelay at that rate = {} s\n",
            render(&bits_to_kb(&buffer)),
            mbps_text(&capacity),
            render(&delay)
        ))),
        other => Err(unsupported(other, "ec")),
    }
}

#[derive(Serialize)]
struct BufferReport {
    units: Units,
    #[serde(rename = "D")]
    delay: Quantity,
    counts: Vec<u64>,
    aggregate_eb: Quantity,
    buffer: Quantity,
    capacity_at_buffer: Quantity,
}

fn cmd_buffer(ctx: &Context, format: Format) -> Result<Output, CliError> {
    let mix = ctx.scenario.mix(&ctx.counts, ctx.delay.clone())?;
    let eb = aggregate_eb(&mix)?.selected_eb;
    let buffer = aggregate_buffer(&mix)?;
    let back = equivalent_capacity(&mix.aggregate_curve(), &buffer)?;
    match format {
        Format::Json => Ok(Output::ok(json(&BufferReport {
            units: UNITS,
            delay: time_q(&ctx.delay),
            counts: ctx.counts.clone(),
            aggregate_eb: rate_q(&eb),
            buffer: data_q(&buffer),
            capacity_at_buffer: rate_q(&back),
        }))),
        Format::Text => Ok(Output::ok(format!(
            "D = {} s\naggregate EB = {}\nbuffer = {} kb\nequivalent capacity of that buffer = {}\n",
            render(&ctx.delay),
            mbps_text(&eb),
            render(&bits_to_kb(&buffer)),
            mbps_text(&back)
        ))),
        other => Err(unsupported(other, "buffer")),
    }
}

#[derive(Serialize)]
struct AdmitReport {
    units: Units,
    accepted: bool,
    counts: Vec<u64>,
    #[serde(rename = "C")]
    capacity: Quantity,
    #[serde(rename = "D")]
    delay: Quantity,
    aggregate_eb: Quantity,
    headroom: Option<Quantity>,
    required_buffer: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provisioned_buffer: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    buffer_sufficient: Option<bool>,
}

fn cmd_admit(ctx: &Context, format: Format) -> Result<Output, CliError> {
    let link = ctx.link()?;
    let decision = decide(ctx.catalog(), &ctx.counts, &link)?;
    let sufficient = match (&decision.required_buffer, &ctx.buffer) {
        (Some(need), Some(have)) => Some(need <= have),
        _ => None,
    };
    let exit = if decision.accepted { EXIT_OK } else { EXIT_REJECTED };
    let text = match format {
        Format::Json => json(&AdmitReport {
            units: UNITS,
            accepted: decision.accepted,
            counts: ctx.counts.clone(),
            capacity: rate_q(&Extended::Finite(ctx.capacity.clone())),
            delay: time_q(&ctx.delay),
            aggregate_eb: rate_q(&decision.aggregate_eb),
            headroom: decision.headroom.as_ref().map(|h| rate_q(&Extended::Finite(h.clone()))),
            required_buffer: decision.required_buffer.as_ref().map(data_q),
            provisioned_buffer: ctx.buffer.as_ref().map(data_q),
            buffer_sufficient: sufficient,
        }),
        Format::Text => {
            let mut text = String::new();
            let verdict = if decision.accepted { "accepted" } else { "rejected" };
            writeln!(text, "{verdict}").unwrap();
            writeln!(text, "aggregate EB = {}", mbps_text(&decision.aggregate_eb)).unwrap();
            writeln!(text, "C = {}", mbps_text(&Extended::Finite(ctx.capacity.clone()))).unwrap();
            if let Some(h) = &decision.headroom {
                writeln!(text, "headroom = {}", mbps_text(&Extended::Finite(h.clone()))).unwrap();
            }
            if let Some(b) = &decision.required_buffer {
                writeln!(text, "required buffer = {} kb", render(&bits_to_kb(b))).unwrap();
            }
            if let Some(ok) = sufficient {
                writeln!(text, "provisioned buffer sufficient = {ok}").unwrap();
            }
            text
        }
        other => return Err(unsupported(other, "admit")),
    };
    Ok(Output {
        text,
        exit,
        files: Vec::new(),
    })
}

/// One delay point of a sweep, in bits and seconds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub delay: Rational,
    pub eb_aggregate: Extended,
    pub sum_eb_individual: Extended,
    pub buffer: Rational,
}

/// `steps` evenly spaced delays from `d_min` to `d_max` inclusive.
pub fn sweep_d(ctx: &Context, d_min: &Rational, d_max: &Rational, steps: usize) -> Result<Vec<SweepRow>, CliError> {
    if !d_min.is_positive() || d_min >= d_max {
        return Err(CliError::Usage("sweep-d needs 0 < --d-min < --d-max".into()));
    }
    if steps < 2 {
        return Err(CliError::Usage("sweep-d needs --steps of at least 2".into()));
    }
    let span = d_max - d_min;
    let last = int(steps as i64 - 1);
    let mix = ctx.scenario.mix(&ctx.counts, d_min.clone())?;
    (0..steps)
        .map(|k| {
            let delay = d_min + &span * int(k as i64) / &last;
            let at = mix.with_delay(delay.clone())?;
            Ok(SweepRow {
                eb_aggregate: aggregate_eb(&at)?.selected_eb,
                sum_eb_individual: sum_of_individual_eb(ctx.catalog(), &ctx.counts, &delay)?,
                buffer: aggregate_buffer(&at)?,
                delay,
            })
        })
        .collect()
}

/// CSV with header `D,eb_aggregate,sum_eb_individual,buffer` (s, Mb/s, Mb/s, kb).
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut text = String::from("D,eb_aggregate,sum_eb_individual,buffer\n");
    for row in rows {
        writeln!(
            text,
            "{},{},{},{}",
            render(&row.delay),
            render_extended(&scale_extended(&row.eb_aggregate, bps_to_mbps)),
            render_extended(&scale_extended(&row.sum_eb_individual, bps_to_mbps)),
            render(&bits_to_kb(&row.buffer))
        )
        .unwrap();
    }
    text
}

#[derive(Serialize)]
struct SweepJsonRow {
    #[serde(rename = "D")]
    delay: Quantity,
    eb_aggregate: Quantity,
    sum_eb_individual: Quantity,
    buffer: Quantity,
}

#[derive(Serialize)]
struct SweepReport {
    units: Units,
    rows: Vec<SweepJsonRow>,
}

fn sweep_json(rows: &[SweepRow]) -> String {
    json(&SweepReport {
        units: UNITS,
        rows: rows
            .iter()
            .map(|r| SweepJsonRow {
                delay: time_q(&r.delay),
                eb_aggregate: rate_q(&r.eb_aggregate),
                sum_eb_individual: rate_q(&r.sum_eb_individual),
                buffer: data_q(&r.buffer),
            })
            .collect(),
    })
}

/// Parse `2,*,*` into fixed counts with `None` for free classes.
pub fn parse_fixed(text: &str, classes: usize) -> Result<Vec<Option<u64>>, CliError> {
    let fixed: Vec<Option<u64>> = text
        .split(',')
        .map(|item| match item.trim() {
            "*" => Ok(None),
            n => n
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("--fixed entry `{n}` is neither a count nor `*`"))),
        })
        .collect::<Result<_, _>>()?;
    if fixed.len() != classes {
        return Err(CliError::Usage(format!(
            "--fixed has {} entries but the scenario has {classes} classes",
            fixed.len()
        )));
    }
    Ok(fixed)
}

fn region_error(ctx: &Context, err: AdmissionError) -> CliError {
    match err {
        AdmissionError::UnboundedClass(i) => CliError::Usage(format!(
            "class `{}` has zero sustainable rate, so its count is unbounded; pass --cap",
            ctx.scenario.names()[i]
        )),
        AdmissionError::FreeClassCount(n) => {
            CliError::Usage(format!("--fixed must leave one or two classes free, found {n}"))
        }
        other => other.into(),
    }
}

#[derive(Serialize)]
struct FrontierReport {
    classes: Vec<String>,
    frontier: Vec<Vec<u64>>,
}

#[derive(Serialize)]
struct TradeoffJsonRow {
    free_classes: Vec<usize>,
    free_counts: Vec<u64>,
    remaining_class: usize,
    max_remaining: u64,
}

fn cmd_region(
    ctx: &Context,
    fixed: Option<&str>,
    pairwise: bool,
    cap: Option<u64>,
    format: Format,
) -> Result<Output, CliError> {
    if !matches!(format, Format::Csv | Format::Json) {
        return Err(unsupported(format, "region"));
    }
    let link = ctx.link()?;
    let classes = ctx.catalog().len();

    // Each table is a list of (free class indices, rows).
    let mut tables: Vec<(Vec<usize>, Vec<ebac_core::TradeoffRow>)> = Vec::new();
    if pairwise {
        if classes < 2 {
            return Err(CliError::Usage("--pairwise needs at least two classes".into()));
        }
        for a in 0..classes {
            for b in a + 1..classes {
                let mut pattern = vec![Some(0); classes];
                pattern[a] = None;
                pattern[b] = None;
                let rows =
                    region_tradeoff_table(ctx.catalog(), &link, &pattern, cap).map_err(|e| region_error(ctx, e))?;
                tables.push((vec![a, b], rows));
            }
        }
    } else if let Some(text) = fixed {
        let pattern = parse_fixed(text, classes)?;
        let free: Vec<usize> = (0..classes).filter(|i| pattern[*i].is_none()).collect();
        let rows = region_tradeoff_table(ctx.catalog(), &link, &pattern, cap).map_err(|e| region_error(ctx, e))?;
        tables.push((free, rows));
    } else {
        let region = admission_region(ctx.catalog(), &link, cap).map_err(|e| region_error(ctx, e))?;
        let text = match format {
            Format::Csv => {
                let header: Vec<String> = (1..=classes).map(|i| format!("n{i}")).collect();
                let mut text = header.join(",") + "\n";
                for point in &region.frontier {
                    let cells: Vec<String> = point.iter().map(u64::to_string).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
                text
            }
            _ => json(&FrontierReport {
                classes: ctx.scenario.names().into_iter().map(str::to_owned).collect(),
                frontier: region.frontier,
            }),
        };
        return Ok(Output::ok(text));
    }

    let text = match format {
        Format::Csv if pairwise => {
            let mut text = String::from("class_a,class_b,n_a,max_n_b\n");
            for (free, rows) in &tables {
                for row in rows {
                    writeln!(
                        text,
                        "{},{},{},{}",
                        free[0] + 1,
                        free[1] + 1,
                        row.free_counts[0],
                        row.max_remaining
                    )
                    .unwrap();
                }
            }
            text
        }
        Format::Csv => {
            let (free, rows) = &tables[0];
            let remaining = free[free.len() - 1];
            let mut header: Vec<String> = free[..free.len() - 1].iter().map(|i| format!("n{}", i + 1)).collect();
            header.push(format!("max_n{}", remaining + 1));
            let mut text = header.join(",") + "\n";
            for row in rows {
                let mut cells: Vec<String> = row.free_counts.iter().map(u64::to_string).collect();
                cells.push(row.max_remaining.to_string());
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            text
        }
        _ => {
            let rows: Vec<TradeoffJsonRow> = tables
                .iter()
                .flat_map(|(free, rows)| {
                    rows.iter().map(move |row| TradeoffJsonRow {
                        free_classes: free[..free.len() - 1].iter().map(|i| i + 1).collect(),
                        free_counts: row.free_counts.clone(),
                        remaining_class: free[free.len() - 1] + 1,
                        max_remaining: row.max_remaining,
                    })
                })
                .collect();
            json(&rows)
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct SimJson {
    units: Units,
    counts: Vec<u64>,
    dt: Quantity,
    horizon: Quantity,
    service_rate: Quantity,
    #[serde(rename = "D")]
    delay_constraint: Quantity,
    max_backlog: Quantity,
    max_virtual_delay: Quantity,
    analytic_backlog_bound: Quantity,
    analytic_delay_bound: Quantity,
    delay_limit: Quantity,
    backlog_limit: Quantity,
    unresolved_samples: usize,
    holds: bool,
    violations: Vec<&'static str>,
}

fn simulation_json(ctx: &Context, report: &SimReport) -> String {
    let backlog_limit = report
        .analytic_backlog_bound
        .add(&Extended::Finite(&report.service_rate * &report.dt));
    json(&SimJson {
        units: UNITS,
        counts: ctx.counts.clone(),
        dt: time_q(&report.dt),
        horizon: time_q(&report.horizon),
        service_rate: rate_q(&Extended::Finite(report.service_rate.clone())),
        delay_constraint: time_q(&report.delay_constraint),
        max_backlog: data_q(&report.max_backlog),
        max_virtual_delay: time_q(&report.max_virtual_delay),
        analytic_backlog_bound: Quantity::extended(&scale_extended(&report.analytic_backlog_bound, bits_to_kb)),
        analytic_delay_bound: Quantity::extended(&report.analytic_delay_bound),
        delay_limit: time_q(&(&report.delay_constraint + &report.dt)),
        backlog_limit: Quantity::extended(&scale_extended(&backlog_limit, bits_to_kb)),
        unresolved_samples: report.unresolved,
        holds: report.holds(),
        violations: report
            .violations()
            .iter()
            .map(|v| match v {
                BoundViolation::Delay { .. } => "delay",
                BoundViolation::Backlog { .. } => "backlog",
            })
            .collect(),
    })
}

fn cmd_simulate(
    ctx: &Context,
    dt: Option<&Rational>,
    horizon: Option<&Rational>,
    trace_path: Option<PathBuf>,
    format: Format,
) -> Result<Output, CliError> {
    let dt = dt.cloned().or_else(|| ctx.scenario.step());
    let horizon = horizon.cloned().or_else(|| ctx.scenario.horizon());
    if dt.as_ref().is_some_and(|d| !d.is_positive()) {
        return Err(CliError::Usage("--dt must be positive".into()));
    }
    let link = ctx.link()?;
    let mix = ctx.scenario.mix(&ctx.counts, ctx.delay.clone())?;
    let report = validate_scenario(&mix, &link, dt.as_ref(), horizon.as_ref())?;
    let text = match format {
        Format::Json => simulation_json(ctx, &report),
        Format::Text => {
            let mut text = String::new();
            writeln!(
                text,
                "service rate = {}",
                mbps_text(&Extended::Finite(report.service_rate.clone()))
            )
            .unwrap();
            writeln!(
                text,
                "dt = {} s, horizon = {} s",
                render(&report.dt),
                render(&report.horizon)
            )
            .unwrap();
            writeln!(
                text,
                "max virtual delay = {} s (limit {} s)",
                render(&report.max_virtual_delay),
                render(&(&report.delay_constraint + &report.dt))
            )
            .unwrap();
            writeln!(
                text,
                "max backlog = {} kb (analytic {} kb)",
                render(&bits_to_kb(&report.max_backlog)),
                render_extended(&scale_extended(&report.analytic_backlog_bound, bits_to_kb))
            )
            .unwrap();
            writeln!(
                text,
                "{}",
                if report.holds() {
                    "bounds hold"
                } else {
                    "BOUND VIOLATED"
                }
            )
            .unwrap();
            text
        }
        other => return Err(unsupported(other, "simulate")),
    };
    let mut files = Vec::new();
    if let Some(path) = trace_path {
        files.push((path, trace_csv(&mix, &report)?));
    }
    Ok(Output {
        text,
        exit: if report.holds() { EXIT_OK } else { EXIT_VIOLATION },
        files,
    })
}

/// CSV with header `t,cumulative_in,cumulative_out,backlog` (s, kb, kb, kb).
pub fn trace_csv(mix: &ebac_core::FlowMix, report: &SimReport) -> Result<String, CliError> {
    let input = greedy_source(&mix.aggregate_curve(), &report.horizon, &report.dt)?;
    let run = fifo_server(&input, &report.service_rate, None)?;
    let mut text = String::from("t,cumulative_in,cumulative_out,backlog\n");
    for (k, (a, d)) in input.samples().iter().zip(run.output.samples()).enumerate() {
        writeln!(
            text,
            "{},{},{},{}",
            render(&input.time_at(k)),
            render(&bits_to_kb(a)),
            render(&bits_to_kb(d)),
            render(&bits_to_kb(&(a - d)))
        )
        .unwrap();
    }
    Ok(text)
}
