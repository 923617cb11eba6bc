use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use combint::forms::path_chain;
use combint::iint::{canonical_correction_with, signature_element};
use combint::vologodsky::{base_correction, BasePath};
use combint::wire::{
    correction_to_json, form_to_json, forms_from_json, graph_from_json, localize, period_table_from_json,
    period_table_to_json, tensor_to_json, WireError, WireScalar,
};
use combint::{
    cint, dual_bases, forms_basis, tate_expected, tate_graph, tate_periods, vologodsky, vologodsky_single, EllPoly,
    Error, Graph, GroupAlgebraElement, Padic, PathWord, PeriodTable, Rational, TateCurveSpec, TropicalOneForm,
};

#[derive(Parser)]
#[command(name = "combint", version, about = "Exact combinatorial and Vologodsky iterated integrals")]
struct Cli {
    /// Where to write the JSON result; `-` is standard output.
    #[arg(long, default_value = "-", global = true)]
    output: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarMode {
    Rational,
    Padic,
}

#[derive(Subcommand)]
enum Command {
    /// Betti number and fundamental loops of a graph.
    Homology {
        #[arg(long)]
        graph: PathBuf,
        /// Base vertex of the loops; defaults to the spanning-tree root.
        #[arg(long)]
        base: Option<String>,
    },
    /// A basis of tropical 1-forms.
    FormsBasis {
        #[arg(long)]
        graph: PathBuf,
    },
    /// An iterated integral along a path.
    Cint {
        #[arg(long)]
        graph: PathBuf,
        /// `basis`, `dual` (dual to the loops at the path start), or a JSON file.
        #[arg(long)]
        forms: String,
        /// Comma-separated directed edges, `-e` for reversed.
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        /// Comma-separated 1-based form indices.
        #[arg(long, default_value = "")]
        word: String,
        /// Start vertex; required for the empty path.
        #[arg(long)]
        start: Option<String>,
    },
    /// Canonical correction of a path in the monomial basis.
    Canonical {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        start: Option<String>,
    },
    /// Vologodsky integrals from a period table.
    Vologodsky {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "rational")]
        scalar: ScalarMode,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 20)]
        prec: u32,
    },
    /// Tate-curve periods, engine output, and the closed form, compared.
    TateDemo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 20)]
        prec: u32,
    },
}

fn malformed(what: &str, msg: impl Into<String>) -> Error {
    Error::Wire(WireError {
        path: what.into(),
        msg: msg.into(),
    })
}

fn read_json(path: &PathBuf) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| malformed(&path.display().to_string(), e.to_string()))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_graph(path: &PathBuf) -> Result<Graph, Error> {
    graph_from_json(&read_json(path)?)
}

fn tokens(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn parse_path(g: &Graph, start: Option<&str>, s: &str) -> Result<PathWord, Error> {
    Ok(g.parse_path(start, &tokens(s))?)
}

fn parse_word(s: &str, forms: usize) -> Result<Vec<usize>, Error> {
    tokens(s)
        .into_iter()
        .map(|t| match t.parse::<usize>() {
            Ok(i) if (1..=forms).contains(&i) => Ok(i - 1),
            _ => Err(malformed("--word", format!("`{t}` is not a form index in 1..={forms}"))),
        })
        .collect()
}

fn homology(g: &Graph, base: Option<&str>) -> Result<Value, Error> {
    let base = match base {
        Some(b) => g.vertex(b)?,
        None => g.spanning_tree().0,
    };
    let loops: serde_json::Map<String, Value> = g
        .cycle_basis(base)
        .into_iter()
        .map(|l| (l.id, json!(l.path.format(g))))
        .collect();
    Ok(json!({
        "betti": g.betti(),
        "forms_dimension": forms_basis(g).len(),
        "base": g.vertex_id(base),
        "loops": loops,
    }))
}

fn run_cint(g: &Graph, forms: &str, path: &str, word: &str, start: Option<&str>) -> Result<Value, Error> {
    let p = parse_path(g, start, path)?;
    let basis: Vec<TropicalOneForm> = match forms {
        "basis" => forms_basis(g),
        "dual" => dual_bases(g, p.start()).forms,
        file => forms_from_json(g, &read_json(&PathBuf::from(file))?)?,
    };
    let w = parse_word(word, basis.len())?;
    let letters: Vec<&TropicalOneForm> = w.iter().map(|&i| &basis[i]).collect();
    Ok(json!({ "value": cint(&p, &letters).to_json() }))
}

fn canonical(g: &Graph, path: &str, n: usize, start: Option<&str>) -> Result<Value, Error> {
    let p = parse_path(g, start, path)?;
    let db = dual_bases(g, p.start());
    let ids: Vec<String> = db.loops.iter().map(|l| l.id.clone()).collect();
    let q = canonical_correction_with(&db, &p, n);
    let qp = q.expand().mul(&GroupAlgebraElement::from_path(&p))?;
    let mut out = correction_to_json(g, &q, &ids);
    out["path"] = json!(p.format(g));
    out["annihilates"] = json!(signature_element(&qp, &db.forms, n).is_one());
    out["path_integrals"] = json!(db
        .forms
        .iter()
        .map(|f| combint::single_cint(g, &path_chain(&p), f).map(|v| v.to_json()))
        .collect::<Result<Vec<_>, _>>()?);
    Ok(out)
}

fn engine_output<S: WireScalar>(g: &Graph, t: &PeriodTable<S>, n: usize) -> Result<Value, Error> {
    let v = vologodsky(g, t, n)?;
    let (q, ids) = base_correction(g, t, n)?;
    let mut out = json!({
        "n": n,
        "forms": t.forms(),
        "tensor": tensor_to_json(&v),
        "grouplike": v.is_grouplike(),
        "table_grouplike": t.is_grouplike(),
        "correction": correction_to_json(g, &q, &ids),
    });
    if n >= 1 {
        let single = vologodsky_single(g, t)?;
        out["single"] = json!(single.iter().map(EllPoly::to_json).collect::<Vec<_>>());
    }
    Ok(out)
}

fn localize_table(t: &PeriodTable<Padic>, p: u64, prec: u32) -> Result<PeriodTable<Padic>, Error> {
    // validates the prime once so the per-coefficient conversions cannot fail
    Padic::approx(&Rational::from_integer(1.into()), p, prec)?;
    let conv = |x: &combint::TruncatedTensor<EllPoly<Padic>>| {
        x.map_scalars(|c| c.map(|a| localize(a, p, prec).expect("prime checked")))
    };
    Ok(PeriodTable::new(
        t.level(),
        t.forms().to_vec(),
        t.loops().iter().map(|(k, v)| (k.clone(), conv(v))).collect(),
        BasePath {
            periods: conv(&t.path().periods),
            ..t.path().clone()
        },
    )?)
}

fn run_vologodsky(g: &Graph, table: &Value, n: usize, mode: ScalarMode, p: Option<u64>, prec: u32) -> Result<Value, Error> {
    match mode {
        ScalarMode::Rational => engine_output(g, &period_table_from_json::<Rational>(table)?, n),
        ScalarMode::Padic => {
            let p = p.ok_or_else(|| malformed("--p", "p-adic mode needs --p"))?;
            let t = localize_table(&period_table_from_json::<Padic>(table)?, p, prec)?;
            engine_output(g, &t, n)
        }
    }
}

fn tate_demo(p: u64, m: usize, n: usize, a: &str, b: &str, prec: u32) -> Result<Value, Error> {
    let point = |name: &str, s: &str| {
        combint::wire::parse_rational(s).ok_or_else(|| malformed(name, format!("`{s}` is not a rational")))
    };
    let spec = TateCurveSpec::from_rationals(p, m, prec, &point("--a", a)?, &point("--b", b)?, n)?;
    let g = tate_graph(m);
    let table = tate_periods(&spec)?;
    let output = vologodsky(&g, &table, n)?;
    let expected = tate_expected(&spec)?;
    let (la, lb) = spec.lifts();
    Ok(json!({
        "graph": combint::wire::graph_to_json(&g),
        "lifts": [la, lb],
        "table": period_table_to_json(&table),
        "output": tensor_to_json(&output),
        "expected": tensor_to_json(&expected),
        "match": output == expected,
    }))
}

fn run(cli: &Cli) -> Result<Value, Error> {
    match &cli.command {
        Command::Homology { graph, base } => homology(&load_graph(graph)?, base.as_deref()),
        Command::FormsBasis { graph } => {
            let g = load_graph(graph)?;
            let forms: Vec<Value> = forms_basis(&g).iter().map(|f| form_to_json(&g, f)).collect();
            Ok(json!({ "forms": forms }))
        }
        Command::Cint {
            graph,
            forms,
            path,
            word,
            start,
        } => run_cint(&load_graph(graph)?, forms, path, word, start.as_deref()),
        Command::Canonical { graph, path, n, start } => canonical(&load_graph(graph)?, path, *n, start.as_deref()),
        Command::Vologodsky {
            graph,
            table,
            n,
            scalar,
            p,
            prec,
        } => run_vologodsky(&load_graph(graph)?, &read_json(table)?, *n, *scalar, *p, *prec),
        Command::TateDemo { p, m, n, a, b, prec } => tate_demo(*p, *m, *n, a, b, *prec),
    }
}

fn emit(output: &str, doc: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("values serialize");
    text.push('\n');
    if output == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(output, text)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => match emit(&cli.output, &doc) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("combint: cannot write {}: {e}", cli.output);
                ExitCode::from(2)
            }
        },
        Err(e) => {
            let doc = json!({ "error": e.code(), "detail": e.to_string() });
            println!("{}", serde_json::to_string_pretty(&doc).expect("values serialize"));
            ExitCode::from(if e.is_malformed() { 2 } else { 1 })
        }
    }
}
