//! Subcommand implementations: each parses its operands, runs the core
//! operation, and prints one text line or one JSON object.

use crate::context::{self, CliError, Context};
use crate::operands::{
    parse_any_automorphism, parse_aut_operand, parse_word_operand, render_word, AutSpec,
};
use crate::{Cli, Command, WitnessCmd};
use num_bigint::BigInt;
use polyz_core::g2::{
    aut2_compose, aut2_is_inner, aut2_out_class, g2_mul, g2_pow, inner_from_element_g2, G2Word,
};
use polyz_core::g3::{
    aut3_compose, aut3_is_inner, g3_mul, g3_pow, inner_from_element, out_class, Variant,
};
use polyz_core::iso::{conjugation_witness, inner_twist_witness, verify_witness, IsoWitness};
use polyz_core::presentation::NormalWord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Read;
use std::time::{Duration, Instant};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    // iso-verify works from the witness alone (it embeds its towers), so
    // it must not demand a group selector
    if let Command::IsoVerify { witness } = &cli.command {
        return iso_verify(cli, witness.as_deref());
    }
    let ctx = context::resolve(cli)?;
    match &cli.command {
        Command::Collect { word } => {
            let (w, form) = parse_word_operand(&ctx, word)?;
            emit(&ctx, "collect", render_word(&w, form), word_payload(&w));
            Ok(())
        }
        Command::Mul { x, y } => {
            let (x, form) = parse_word_operand(&ctx, x)?;
            let (y, _) = parse_word_operand(&ctx, y)?;
            let z = ctx.tower.mul(&x, &y);
            emit(&ctx, "mul", render_word(&z, form), word_payload(&z));
            Ok(())
        }
        Command::Inv { x } => {
            let (x, form) = parse_word_operand(&ctx, x)?;
            let z = ctx.tower.inv(&x);
            emit(&ctx, "inv", render_word(&z, form), word_payload(&z));
            Ok(())
        }
        Command::Pow { x, m } => {
            let (x, form) = parse_word_operand(&ctx, x)?;
            let m: BigInt = m
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid exponent {m:?}")))?;
            let z = ctx.tower.pow(&x, &m);
            emit(&ctx, "pow", render_word(&z, form), word_payload(&z));
            Ok(())
        }
        Command::AutClassify { matrix } => {
            let spec = parse_aut_operand(&ctx, matrix)?;
            emit(&ctx, "aut-classify", spec.text(), aut_payload(&spec));
            Ok(())
        }
        Command::AutCompose { f, g } => {
            let f = parse_aut_operand(&ctx, f)?;
            let g = parse_aut_operand(&ctx, g)?;
            let h = match (&f, &g) {
                (AutSpec::G2(f), AutSpec::G2(g)) => AutSpec::G2(aut2_compose(f, g)),
                (AutSpec::G3(f), AutSpec::G3(g)) => AutSpec::G3(aut3_compose(f, g)),
                _ => unreachable!("operands classified against one group"),
            };
            emit(&ctx, "aut-compose", h.text(), aut_payload(&h));
            Ok(())
        }
        Command::AutInner { element } => {
            let (h, _) = parse_word_operand(&ctx, element)?;
            let spec = if let Some(variant) = ctx.variant {
                AutSpec::G3(inner_from_element(variant, &h))
            } else if ctx.is_g2 {
                AutSpec::G2(inner_from_element_g2(&h))
            } else {
                return Err(CliError::Usage(format!(
                    "{} has no classified automorphism families; \
                     use --group g2, b1, a0, a1, or b0",
                    ctx.label
                )));
            };
            emit(&ctx, "aut-inner", spec.text(), aut_payload(&spec));
            Ok(())
        }
        Command::OutClass { automorphism } => {
            let spec = parse_aut_operand(&ctx, automorphism)?;
            let (class_text, rep, inner) = match &spec {
                AutSpec::G2(f) => {
                    let class = aut2_out_class(f);
                    (
                        class.to_string(),
                        class.representative().to_string(),
                        aut2_is_inner(f),
                    )
                }
                AutSpec::G3(f) => {
                    let class = out_class(f);
                    (
                        class.to_string(),
                        class.representative().to_string(),
                        aut3_is_inner(f),
                    )
                }
            };
            emit(
                &ctx,
                "out-class",
                class_text.clone(),
                json!({ "class": class_text, "representative": rep, "inner": inner }),
            );
            Ok(())
        }
        Command::IsoWitness { kind } => iso_witness(&ctx, kind),
        Command::Central { word } => {
            let (w, _) = parse_word_operand(&ctx, word)?;
            let central = ctx.tower.is_central(&w);
            emit(
                &ctx,
                "central",
                central.to_string(),
                json!({ "central": central }),
            );
            Ok(())
        }
        Command::Bench { op } => bench(&ctx, op),
        Command::IsoVerify { .. } => unreachable!("handled before group resolution"),
    }
}

/// Prints the text line, or the JSON envelope when `--json` is set. The
/// envelope is `{"schema", "command", "group"}` plus the payload fields.
fn emit(ctx: &Context, command: &str, text: String, payload: Value) {
    if ctx.json {
        let mut obj = json!({
            "schema": "polyz-cli/1",
            "command": command,
            "group": ctx.label,
        });
        let map = obj.as_object_mut().expect("envelope is an object");
        for (k, v) in payload.as_object().expect("payload is an object") {
            map.insert(k.clone(), v.clone());
        }
        println!("{obj}");
    } else {
        println!("{text}");
    }
}

fn word_payload(w: &NormalWord) -> Value {
    json!({ "word": serde_json::to_value(w).expect("words serialize") })
}

fn aut_payload(spec: &AutSpec) -> Value {
    json!({
        "automorphism": spec.text(),
        "matrix": serde_json::to_value(spec.matrix()).expect("matrices serialize"),
    })
}

fn iso_witness(ctx: &Context, kind: &WitnessCmd) -> Result<(), CliError> {
    let witness = match kind {
        WitnessCmd::InnerTwist { alpha, element } => {
            let alpha = parse_any_automorphism(ctx, alpha)?;
            let (a, _) = parse_word_operand(ctx, element)?;
            inner_twist_witness(&ctx.tower, &alpha, &a)
                .map_err(|e| CliError::Domain(e.to_string()))?
        }
        WitnessCmd::Conjugation { alpha, psi } => {
            let alpha = parse_any_automorphism(ctx, alpha)?;
            let psi = parse_any_automorphism(ctx, psi)?;
            conjugation_witness(&ctx.tower, &alpha, &psi)
                .map_err(|e| CliError::Domain(e.to_string()))?
        }
    };
    let v = serde_json::to_value(&witness).expect("witnesses serialize");
    let pretty = serde_json::to_string_pretty(&v).expect("valid JSON");
    emit(ctx, "iso-witness", pretty, json!({ "witness": v }));
    Ok(())
}

fn iso_verify(cli: &Cli, witness_arg: Option<&str>) -> Result<(), CliError> {
    let text = match witness_arg {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            buf
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?,
    };
    let witness: IsoWitness = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid witness JSON: {e}")))?;
    let count = cli.count.unwrap_or(1_000);
    let report = verify_witness(&witness, count, 10, cli.seed)
        .map_err(|e| CliError::Domain(format!("unusable witness: {e}")))?;
    let passed = report.passed();
    let mut lines = vec![
        format!(
            "samples: {}, exponent bound: {}, seed: {}",
            report.sample_count, report.exponent_bound, report.seed
        ),
        format!(
            "multiplicativity failures: {}",
            report.multiplicativity_failures
        ),
        format!("round-trip failures: {}", report.round_trip_failures),
    ];
    for failure in &report.failures {
        lines.push(format!("  - {failure}"));
    }
    lines.push(if passed { "PASS".into() } else { "FAIL".into() });
    let payload = json!({
        "passed": passed,
        "report": serde_json::to_value(&report).expect("reports serialize"),
    });
    if cli.json {
        let obj = json!({
            "schema": "polyz-cli/1",
            "command": "iso-verify",
            "passed": payload["passed"],
            "report": payload["report"],
        });
        println!("{obj}");
    } else {
        println!("{}", lines.join("\n"));
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Domain("witness verification failed".into()))
    }
}

/// The closed-form kernel backing `bench` for one preset.
enum Kernel {
    TwoStep,
    ThreeStep(Variant),
}

impl Kernel {
    fn mul(&self, x: &NormalWord, y: &NormalWord) -> NormalWord {
        match self {
            Kernel::TwoStep => from_g2(&g2_mul(&to_g2(x), &to_g2(y))),
            Kernel::ThreeStep(v) => g3_mul(*v, x, y),
        }
    }

    fn pow(&self, x: &NormalWord, m: &BigInt) -> NormalWord {
        match self {
            Kernel::TwoStep => from_g2(&g2_pow(&to_g2(x), m)),
            Kernel::ThreeStep(v) => g3_pow(*v, x, m),
        }
    }
}

fn to_g2(w: &NormalWord) -> G2Word {
    let e = w.exponents();
    (e[0].clone(), e[1].clone())
}

fn from_g2(w: &G2Word) -> NormalWord {
    NormalWord::new(vec![w.0.clone(), w.1.clone()])
}

enum BenchInput {
    Mul(NormalWord, NormalWord),
    Pow(NormalWord, BigInt),
}

fn bench(ctx: &Context, op: &str) -> Result<(), CliError> {
    let kernel = if ctx.is_g2 {
        Kernel::TwoStep
    } else if let Some(v) = ctx.variant {
        Kernel::ThreeStep(v)
    } else {
        return Err(CliError::Usage(format!(
            "{} has no closed-form kernel; bench needs --group g2, b1, a0, a1, or b0",
            ctx.label
        )));
    };
    let runs = ctx.count.unwrap_or(10_000);
    let corrupt = std::env::var_os("POLYZ_BENCH_CORRUPT").is_some();
    let n = ctx.tower.n();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let word = |rng: &mut ChaCha8Rng| {
        NormalWord::new(
            (0..n)
                .map(|_| BigInt::from(rng.gen_range(-15i64..=15)))
                .collect(),
        )
    };
    let inputs: Vec<BenchInput> = (0..runs)
        .map(|_| match op {
            "mul" => BenchInput::Mul(word(&mut rng), word(&mut rng)),
            _ => BenchInput::Pow(
                word(&mut rng),
                BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000)),
            ),
        })
        .collect();

    // correctness precedes speed: every kernel result must match the engine
    for (i, input) in inputs.iter().enumerate() {
        let (kernel_result, engine_result) = match input {
            BenchInput::Mul(x, y) => (kernel.mul(x, y), ctx.tower.mul(x, y)),
            BenchInput::Pow(x, m) => (kernel.pow(x, m), ctx.tower.pow(x, m)),
        };
        let kernel_result = if corrupt {
            let mut exps = kernel_result.exponents().to_vec();
            exps[0] += 1;
            NormalWord::new(exps)
        } else {
            kernel_result
        };
        if kernel_result != engine_result {
            return Err(CliError::Domain(format!(
                "kernel and engine disagree on {op} input #{i}: {kernel_result} vs {engine_result}"
            )));
        }
    }

    let median = |mut v: Vec<Duration>| -> u64 {
        v.sort();
        v[v.len() / 2].as_nanos() as u64
    };
    let (kernel_ns, engine_ns, speedup) = if runs == 0 {
        (None, None, None)
    } else {
        let kernel_ns = median(
            inputs
                .iter()
                .map(|input| {
                    let s = Instant::now();
                    match input {
                        BenchInput::Mul(x, y) => std::hint::black_box(kernel.mul(x, y)),
                        BenchInput::Pow(x, m) => std::hint::black_box(kernel.pow(x, m)),
                    };
                    s.elapsed()
                })
                .collect(),
        );
        let engine_ns = median(
            inputs
                .iter()
                .map(|input| {
                    let s = Instant::now();
                    match input {
                        BenchInput::Mul(x, y) => std::hint::black_box(ctx.tower.mul(x, y)),
                        BenchInput::Pow(x, m) => std::hint::black_box(ctx.tower.pow(x, m)),
                    };
                    s.elapsed()
                })
                .collect(),
        );
        let speedup = engine_ns as f64 / (kernel_ns.max(1)) as f64;
        (Some(kernel_ns), Some(engine_ns), Some(speedup))
    };

    let text = match (kernel_ns, engine_ns, speedup) {
        (Some(k), Some(e), Some(s)) => format!(
            "bench {op} on {}: {runs} runs\nkernel median: {k} ns\nengine median: {e} ns\nspeedup: {s:.1}x",
            ctx.label
        ),
        _ => format!("bench {op} on {}: 0 runs", ctx.label),
    };
    emit(
        ctx,
        "bench",
        text,
        json!({
            "op": op,
            "runs": runs,
            "kernel_ns_median": kernel_ns,
            "engine_ns_median": engine_ns,
            "speedup": speedup,
        }),
    );
    Ok(())
}
