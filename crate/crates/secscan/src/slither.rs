//! Adapter for the external Slither analyzer. We invoke the tool with JSON
//! output, then translate its detector identifiers into our class enum via
//! a shipped mapping table; identifiers the table does not know become
//! OTHER findings and are recorded as mapping gaps rather than dropped.

use crate::{Confidence, SecError, VulnClass, VulnFinding};
use serde::Deserialize;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;

/// Detector-id → class table. The default ships with the crate.
#[derive(Debug, Clone)]
pub struct DetectorMap {
    map: HashMap<String, VulnClass>,
}

const DEFAULT_MAP: &str = include_str!("../detector_map.json");

impl Default for DetectorMap {
    fn default() -> Self {
        Self::from_json(DEFAULT_MAP).expect("bundled detector map is valid")
    }
}

impl DetectorMap {
    pub fn from_json(json: &str) -> Result<Self, SecError> {
        let raw: HashMap<String, String> =
            serde_json::from_str(json).map_err(|e| SecError::BadReport(e.to_string()))?;
        let mut map = HashMap::new();
        for (id, class) in raw {
            let class = match class.as_str() {
                "RE" => VulnClass::RE,
                "AC" => VulnClass::AC,
                "AR" => VulnClass::AR,
                "ULLC" => VulnClass::ULLC,
                "DoS" => VulnClass::DoS,
                "BR" => VulnClass::BR,
                "FR" => VulnClass::FR,
                "TM" => VulnClass::TM,
                "OTHER" => VulnClass::OTHER,
                other => {
                    return Err(SecError::BadReport(format!(
                        "unknown class {other:?} for detector {id:?}"
                    )))
                }
            };
            map.insert(id, class);
        }
        Ok(Self { map })
    }

    pub fn class_of(&self, detector_id: &str) -> Option<VulnClass> {
        self.map.get(detector_id).copied()
    }
}

#[derive(Debug, Deserialize)]
struct SlitherReport {
    results: Option<SlitherResults>,
}

#[derive(Debug, Deserialize)]
struct SlitherResults {
    #[serde(default)]
    detectors: Vec<SlitherDetection>,
}

#[derive(Debug, Deserialize)]
struct SlitherDetection {
    check: String,
    #[serde(default)]
    elements: Vec<SlitherElement>,
}

#[derive(Debug, Deserialize)]
struct SlitherElement {
    source_mapping: Option<SourceMapping>,
}

#[derive(Debug, Deserialize)]
struct SourceMapping {
    #[serde(default)]
    start: usize,
    #[serde(default)]
    length: usize,
}

/// Translate a Slither JSON report. Returns the findings plus the list of
/// detector ids missing from the map (each already emitted as OTHER).
pub fn parse_slither_report(
    json: &str,
    map: &DetectorMap,
) -> Result<(Vec<VulnFinding>, Vec<String>), SecError> {
    let report: SlitherReport =
        serde_json::from_str(json).map_err(|e| SecError::BadReport(e.to_string()))?;
    let detections = report
        .results
        .map(|r| r.detectors)
        .unwrap_or_default();
    let mut findings = Vec::new();
    let mut gaps = Vec::new();
    for detection in detections {
        let class = match map.class_of(&detection.check) {
            Some(class) => class,
            None => {
                gaps.push(detection.check.clone());
                VulnClass::OTHER
            }
        };
        let span = detection
            .elements
            .first()
            .and_then(|e| e.source_mapping.as_ref())
            .map(|m| (m.start, m.start + m.length))
            .unwrap_or((0, 0));
        findings.push(VulnFinding {
            class,
            span,
            detector: detection.check,
            confidence: Confidence::High,
        });
    }
    Ok((findings, gaps))
}

/// Run the external analyzer on `source` and translate its report.
pub fn slither_adapter(
    source: &solfront::ContractSource,
    slither: &Path,
    map: &DetectorMap,
) -> Result<(Vec<VulnFinding>, Vec<String>), SecError> {
    let mut file = tempfile::Builder::new()
        .suffix(".sol")
        .tempfile()
        .map_err(SecError::Io)?;
    file.write_all(source.text.as_bytes()).map_err(SecError::Io)?;
    let output = Command::new(slither)
        .arg(file.path())
        .args(["--json", "-"])
        .output()
        .map_err(|e| SecError::ToolSpawn {
            tool: slither.display().to_string(),
            message: e.to_string(),
        })?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    parse_slither_report(&stdout, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(check: &str) -> String {
        format!(
            r#"{{"success": true, "results": {{"detectors": [
                {{"check": "{check}", "impact": "High",
                  "elements": [{{"source_mapping": {{"start": 120, "length": 40}}}}]}}
            ]}}}}"#
        )
    }

    #[test]
    fn reentrancy_eth_maps_to_re() {
        let map = DetectorMap::default();
        let (findings, gaps) = parse_slither_report(&report("reentrancy-eth"), &map).unwrap();
        assert!(gaps.is_empty());
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].class, VulnClass::RE);
        assert_eq!(findings[0].span, (120, 160));
    }

    #[test]
    fn timestamp_maps_to_tm() {
        let map = DetectorMap::default();
        let (findings, _) = parse_slither_report(&report("timestamp"), &map).unwrap();
        assert_eq!(findings[0].class, VulnClass::TM);
    }

    #[test]
    fn unknown_id_becomes_other_with_gap() {
        let map = DetectorMap::default();
        let (findings, gaps) =
            parse_slither_report(&report("some-novel-check"), &map).unwrap();
        assert_eq!(findings[0].class, VulnClass::OTHER);
        assert_eq!(gaps, vec!["some-novel-check".to_string()]);
    }

    #[test]
    fn empty_results_section_is_fine() {
        let map = DetectorMap::default();
        let (findings, gaps) =
            parse_slither_report(r#"{"success": true, "results": {}}"#, &map).unwrap();
        assert!(findings.is_empty());
        assert!(gaps.is_empty());
    }

    #[test]
    fn malformed_report_is_an_error() {
        let map = DetectorMap::default();
        assert!(matches!(
            parse_slither_report("not json", &map),
            Err(SecError::BadReport(_))
        ));
    }

    #[test]
    fn missing_binary_is_spawn_error() {
        let map = DetectorMap::default();
        let src = solfront::ContractSource::generated("contract A {}");
        let err = slither_adapter(&src, Path::new("/nonexistent/slither"), &map).unwrap_err();
        assert!(matches!(err, SecError::ToolSpawn { .. }));
    }

    #[test]
    fn bundled_map_covers_the_core_ids() {
        let map = DetectorMap::default();
        assert_eq!(map.class_of("reentrancy-eth"), Some(VulnClass::RE));
        assert_eq!(map.class_of("tx-origin"), Some(VulnClass::AC));
        assert_eq!(map.class_of("weak-prng"), Some(VulnClass::BR));
        assert_eq!(map.class_of("calls-loop"), Some(VulnClass::DoS));
        assert_eq!(map.class_of("unchecked-lowlevel"), Some(VulnClass::ULLC));
        assert_eq!(map.class_of("nonexistent-check"), None);
    }
}
