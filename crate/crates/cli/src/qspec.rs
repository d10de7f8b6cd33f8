//! Parsing of `-q` arguments: `const:C`, `zeros:V[*M],...@AMP`, or a field file.

use waf_core::qdiff::{constant_field, synth_with_zeros, QFieldFile, QuadDiffNormField, Zero};
use waf_core::{Error, Result, SurfaceMesh};

use crate::io::Inputs;

pub fn parse(spec: &str, mesh: &SurfaceMesh, inputs: &mut Inputs) -> Result<QuadDiffNormField> {
    if let Some(c) = spec.strip_prefix("const:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::validation("-q", format!("bad constant in {spec:?}")))?;
        return constant_field(mesh, c);
    }
    if let Some(rest) = spec.strip_prefix("zeros:") {
        let (list, amp) = rest
            .split_once('@')
            .ok_or_else(|| Error::validation("-q", "expected zeros:V[*M],...@AMPLITUDE"))?;
        let amplitude: f64 = amp
            .parse()
            .map_err(|_| Error::validation("-q", format!("bad amplitude {amp:?}")))?;
        let mut zeros = Vec::new();
        for item in list.split(',') {
            let (v, m) = item.split_once('*').unwrap_or((item, "1"));
            let vertex = v.trim().parse().map_err(|_| Error::validation("-q", format!("bad vertex {v:?}")))?;
            let multiplicity = m.trim().parse().map_err(|_| Error::validation("-q", format!("bad multiplicity {m:?}")))?;
            zeros.push(Zero { vertex, multiplicity });
        }
        return synth_with_zeros(mesh, &zeros, amplitude);
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    let text = inputs.read("q", path)?;
    let file: QFieldFile = serde_json::from_str(&text).map_err(|e| Error::validation(path, e.to_string()))?;
    QuadDiffNormField::from_file(mesh, file)
}
