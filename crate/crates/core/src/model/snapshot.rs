//! Line-oriented text snapshot of a model: one element per line as
//! `kind id key=value ...`. Floats use the shortest round-trip representation.

use std::collections::HashMap;
use std::fmt::Write;

use super::{
    ArchitectureModel, Component, ComponentId, ComponentType, ComponentTypeId, Connector,
    ConnectorId, ConnectorState, Failure, FailureId, LifecycleState, ModelError, Shop, ShopId,
};

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|i| i.to_string()).collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(",")
    }
}

pub(super) fn write_snapshot(model: &ArchitectureModel) -> String {
    let mut out = String::new();
    for t in &model.types {
        let _ = writeln!(
            out,
            "type {} slot={} reliability={} name={}",
            t.id, t.slot, t.reliability, t.name
        );
    }
    for s in &model.shops {
        let _ = writeln!(out, "shop {} components={}", s.id, join(&s.components));
    }
    for c in &model.components {
        let failures = join(c.failures.iter().map(|f| format!("f{}@{}", f.id.0, f.time)));
        let shop = c.shop.map_or("-".to_string(), |s| s.to_string());
        let _ = writeln!(
            out,
            "component {} type={} slot={} shop={} state={} criticality={} failures={} required={} provided={}",
            c.id,
            c.type_id,
            c.slot,
            shop,
            c.state.as_str(),
            c.criticality,
            failures,
            join(&c.required),
            join(&c.provided),
        );
    }
    for k in &model.connectors {
        let state = match k.state {
            ConnectorState::Ok => "OK",
            ConnectorState::Crashed => "CRASHED",
        };
        let _ = writeln!(
            out,
            "connector {} shop={} source={} target={} interface={} state={}",
            k.id, k.shop, k.source, k.target, k.interface, state
        );
    }
    let _ = writeln!(out, "next_failure {}", model.next_failure);
    out
}

fn bad(line: usize, msg: impl std::fmt::Display) -> ModelError {
    ModelError::Parse(format!("line {}: {msg}", line + 1))
}

fn list<T: std::str::FromStr<Err = ModelError>>(s: &str) -> Result<Vec<T>, ModelError> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, ModelError> {
    s.parse().map_err(|_| bad(line, format!("bad number {s:?}")))
}

/// Parses a snapshot produced by [`ArchitectureModel::snapshot`].
pub fn parse_snapshot(text: &str) -> Result<ArchitectureModel, ModelError> {
    let mut types = Vec::new();
    let mut shops = Vec::new();
    let mut components = Vec::new();
    let mut connectors = Vec::new();
    let mut next_failure = 0;

    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, rest) = line.split_once(' ').ok_or_else(|| bad(n, "missing id"))?;
        if kind == "next_failure" {
            next_failure = num(rest, n)?;
            continue;
        }
        // the type name may contain spaces and always comes last
        let (head, name) = match rest.split_once(" name=") {
            Some((h, name)) => (h, Some(name)),
            None => (rest, None),
        };
        let mut parts = head.split(' ');
        let id = parts.next().ok_or_else(|| bad(n, "missing id"))?;
        let attrs: HashMap<&str, &str> = parts
            .map(|p| p.split_once('=').ok_or_else(|| bad(n, format!("bad attribute {p:?}"))))
            .collect::<Result<_, _>>()?;
        let get = |key: &str| attrs.get(key).copied().ok_or_else(|| bad(n, format!("missing {key}")));

        match kind {
            "type" => types.push(ComponentType {
                id: id.parse::<ComponentTypeId>()?,
                name: name.ok_or_else(|| bad(n, "missing name"))?.to_string(),
                slot: num(get("slot")?, n)?,
                reliability: num(get("reliability")?, n)?,
            }),
            "shop" => shops.push(Shop {
                id: id.parse::<ShopId>()?,
                components: list(get("components")?)?,
            }),
            "component" => {
                let failures = match get("failures")? {
                    "-" => Vec::new(),
                    s => s
                        .split(',')
                        .map(|f| {
                            let (fid, time) = f
                                .strip_prefix('f')
                                .and_then(|f| f.split_once('@'))
                                .ok_or_else(|| bad(n, format!("bad failure {f:?}")))?;
                            Ok(Failure {
                                id: FailureId(num(fid, n)?),
                                time: num(time, n)?,
                            })
                        })
                        .collect::<Result<_, ModelError>>()?,
                };
                let shop = match get("shop")? {
                    "-" => None,
                    s => Some(s.parse::<ShopId>()?),
                };
                components.push(Component {
                    id: id.parse::<ComponentId>()?,
                    type_id: get("type")?.parse()?,
                    slot: num(get("slot")?, n)?,
                    shop,
                    state: get("state")?.parse::<LifecycleState>()?,
                    criticality: num(get("criticality")?, n)?,
                    failures,
                    required: list(get("required")?)?,
                    provided: list(get("provided")?)?,
                });
            }
            "connector" => connectors.push(Connector {
                id: id.parse::<ConnectorId>()?,
                shop: get("shop")?.parse()?,
                source: get("source")?.parse()?,
                target: get("target")?.parse()?,
                interface: num(get("interface")?, n)?,
                state: match get("state")? {
                    "OK" => ConnectorState::Ok,
                    "CRASHED" => ConnectorState::Crashed,
                    s => return Err(bad(n, format!("bad connector state {s:?}"))),
                },
            }),
            other => return Err(bad(n, format!("unknown element kind {other:?}"))),
        }
    }
    Ok(ArchitectureModel::from_parts(types, shops, components, connectors, next_failure))
}
