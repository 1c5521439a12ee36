//! Output documents in JSON, CSV and text.

use landau_core::bounds::format_f64;
use landau_core::curves::ProfileRow;
use landau_core::lab::format_sig17;
use landau_core::lab::suite::render_table;
use landau_core::quadrature::Estimate;
use landau_core::{CheckResult, HyperbolicityReport};
use serde::Serialize;

use crate::{Failure, Format};

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn csv<R: Serialize>(header: Option<&[&str]>, rows: impl IntoIterator<Item = R>) -> Result<String, Failure> {
    let fail = |e: csv::Error| Failure::Input(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(header.is_none()).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).map_err(fail)?;
    }
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Input(e.to_string()))
}

fn subset(s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

pub fn report(r: &HyperbolicityReport, format: Format) -> Result<String, Failure> {
    let doc = r.to_document();
    match format {
        Format::Json => json(&doc),
        Format::Csv => csv(
            Some(&["subset", "lambda", "Lambda", "lambda_sharp", "Lambda_sharp", "g_term"]),
            doc.per_subset.iter().map(|row| {
                (subset(&row.subset), &row.lambda, &row.big_lambda, &row.lambda_sharp, &row.big_lambda_sharp, &row.g_term)
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            s.push_str(&format!("dimension          {}\n", doc.dimension));
            s.push_str(&format!("hyperplanes used   {}\n", subset(&doc.selected)));
            s.push_str(&format!("B                  {}\n", doc.b));
            s.push_str(&format!("G                  {}  at {}\n", doc.g, subset(&doc.g_argmax)));
            s.push_str(&format!("G#                 {}  at {}\n", doc.g_sharp, subset(&doc.g_sharp_argmin)));
            s.push_str(&format!("log10 area bound   {}\n", doc.log10_area_bound));
            s.push_str(&format!("log10 K            {}\n", doc.log10_k));
            s.push_str(&format!("ln K               {}\n", doc.ln_k));
            s.push_str(&format!("precision          {} bits\n", doc.precision_bits));
            for w in &doc.warnings {
                s.push_str(&format!("warning: {w}\n"));
            }
            s.push_str(&format!(
                "\n{:<16} {:>24} {:>24} {:>24} {:>24}\n",
                "subset", "lambda", "Lambda", "lambda#", "Lambda#"
            ));
            for row in &doc.per_subset {
                s.push_str(&format!(
                    "{:<16} {:>24} {:>24} {:>24} {:>24}\n",
                    subset(&row.subset),
                    row.lambda,
                    row.big_lambda,
                    row.lambda_sharp,
                    row.big_lambda_sharp
                ));
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct ResultRow<'a> {
    name: &'a str,
    passed: bool,
    margin: String,
    bound: String,
    attained: String,
    scale: &'a str,
    witness_re: String,
    witness_im: String,
    samples: u64,
    instance: &'a str,
}

pub fn results(results: &[CheckResult], format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => json(results),
        Format::Csv => csv(
            None,
            results.iter().map(|r| ResultRow {
                name: &r.name,
                passed: r.passed(),
                margin: format_sig17(r.margin),
                bound: format_sig17(r.bound),
                attained: format_sig17(r.attained),
                scale: match r.scale {
                    landau_core::lab::Scale::Linear => "linear",
                    landau_core::lab::Scale::Log => "log",
                },
                witness_re: r.witness.map(|w| format_sig17(w[0])).unwrap_or_default(),
                witness_im: r.witness.map(|w| format_sig17(w[1])).unwrap_or_default(),
                samples: r.samples,
                instance: &r.instance,
            }),
        ),
        Format::Text => {
            let failed = results.iter().filter(|r| !r.passed()).count();
            Ok(format!("{}\n{} results, {failed} failed\n", render_table(results), results.len()))
        }
    }
}

#[derive(Serialize)]
struct ProfileDoc {
    radius: String,
    max_fs_derivative: String,
    area: String,
}

/// Profiles are CSV unless JSON is asked for.
pub fn profile(rows: &[ProfileRow], format: Format) -> Result<String, Failure> {
    let docs = rows.iter().map(|r| ProfileDoc {
        radius: format_f64(r.radius),
        max_fs_derivative: format_f64(r.max_fs_derivative),
        area: format_f64(r.area),
    });
    match format {
        Format::Json => json(&docs.collect::<Vec<_>>()),
        Format::Csv | Format::Text => csv(None, docs),
    }
}

#[derive(Serialize)]
struct AreaDoc {
    radius: String,
    extrapolated: bool,
    area: String,
    error: String,
}

pub fn area(radius: f64, extrapolated: bool, e: &Estimate, format: Format) -> Result<String, Failure> {
    let doc = AreaDoc { radius: format_f64(radius), extrapolated, area: format_f64(e.value), error: format_f64(e.error) };
    match format {
        Format::Json => json(&doc),
        Format::Csv => csv(None, [doc]),
        Format::Text => Ok(format!(
            "σ({}) = {}  (error estimate {}){}\n",
            doc.radius,
            doc.area,
            doc.error,
            if extrapolated { ", extrapolated" } else { "" }
        )),
    }
}
