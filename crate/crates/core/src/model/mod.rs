//! Architectural runtime model of a multi-shop marketplace.
//!
//! The model is a typed object graph of shops, components, connectors and the
//! failures observed on components. Every mutation returns the
//! [`ChangeEvent`]s it caused; the analyzer and the utility ledger are driven
//! exclusively by those events.

mod snapshot;
pub mod topology;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use snapshot::parse_snapshot;
use topology::{ALTERNATIVES_PER_SLOT, CONNECTOR_TOPOLOGY, SLOTS_PER_SHOP, SLOT_NAMES};

/// Number of exceptions a started component must throw before it counts as a CF2 issue.
pub const EXCEPTION_THRESHOLD: usize = 5;

/// Reliabilities are drawn from a dyadic grid so that every utility value and
/// every sum of them is exactly representable.
pub const RELIABILITY_GRID: u32 = 1024;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .and_then(|n| n.parse().ok())
                    .map($name)
                    .ok_or_else(|| ModelError::Parse(format!("bad id {s:?}")))
            }
        }
    };
}

id_type!(ShopId, "s");
id_type!(ComponentId, "c");
id_type!(ConnectorId, "k");
id_type!(ComponentTypeId, "t");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FailureId(pub u64);

/// Reference to any element of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementRef {
    Shop(ShopId),
    Component(ComponentId),
    Connector(ConnectorId),
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Shop(id) => id.fmt(f),
            ElementRef::Component(id) => id.fmt(f),
            ElementRef::Connector(id) => id.fmt(f),
        }
    }
}

impl FromStr for ElementRef {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.chars().next() {
            Some('s') => s.parse().map(ElementRef::Shop),
            Some('c') => s.parse().map(ElementRef::Component),
            Some('k') => s.parse().map(ElementRef::Connector),
            _ => Err(ModelError::Parse(format!("bad element reference {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LifecycleState {
    Undeployed,
    Deployed,
    Started,
    Crashed,
    Removed,
}

impl LifecycleState {
    pub fn as_str(self) -> &'static str {
        match self {
            LifecycleState::Undeployed => "UNDEPLOYED",
            LifecycleState::Deployed => "DEPLOYED",
            LifecycleState::Started => "STARTED",
            LifecycleState::Crashed => "CRASHED",
            LifecycleState::Removed => "REMOVED",
        }
    }
}

impl FromStr for LifecycleState {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "UNDEPLOYED" => LifecycleState::Undeployed,
            "DEPLOYED" => LifecycleState::Deployed,
            "STARTED" => LifecycleState::Started,
            "CRASHED" => LifecycleState::Crashed,
            "REMOVED" => LifecycleState::Removed,
            _ => return Err(ModelError::Parse(format!("bad lifecycle state {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConnectorState {
    Ok,
    Crashed,
}

/// The four kinds of critical failure that can be injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureKind {
    /// Component crash.
    Cf1,
    /// Five or more exceptions thrown by a started component.
    Cf2,
    /// Component removal.
    Cf3,
    /// Connector crash.
    Cf4,
}

impl FailureKind {
    pub const ALL: [FailureKind; 4] = [
        FailureKind::Cf1,
        FailureKind::Cf2,
        FailureKind::Cf3,
        FailureKind::Cf4,
    ];
    /// The kinds exercised by the default failure traces.
    pub const COMPONENT: [FailureKind; 3] = [FailureKind::Cf1, FailureKind::Cf2, FailureKind::Cf3];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureKind::Cf1 => "CF1",
            FailureKind::Cf2 => "CF2",
            FailureKind::Cf3 => "CF3",
            FailureKind::Cf4 => "CF4",
        }
    }

    pub fn targets_connector(self) -> bool {
        self == FailureKind::Cf4
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FailureKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "CF1" => Ok(FailureKind::Cf1),
            "CF2" => Ok(FailureKind::Cf2),
            "CF3" => Ok(FailureKind::Cf3),
            "CF4" => Ok(FailureKind::Cf4),
            _ => Err(ModelError::Parse(format!("bad failure kind {s:?}"))),
        }
    }
}

/// Concrete repair applied to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairAction {
    Restart,
    LwRedeploy,
    HwRedeploy,
    Replace { alternative: ComponentTypeId },
    RecreateConnector,
}

impl fmt::Display for RepairAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepairAction::Restart => f.write_str("RESTART"),
            RepairAction::LwRedeploy => f.write_str("LW_REDEPLOY"),
            RepairAction::HwRedeploy => f.write_str("HW_REDEPLOY"),
            RepairAction::Replace { alternative } => write!(f, "REPLACE({alternative})"),
            RepairAction::RecreateConnector => f.write_str("RECREATE_CONNECTOR"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChangeKind {
    ComponentCrashed,
    ComponentRemoved,
    ExceptionOccurred {
        failure: FailureId,
    },
    ConnectorCrashed,
    ComponentRestarted,
    ComponentRedeployed {
        heavy: bool,
    },
    ComponentReplaced {
        replacement: ComponentId,
        new_type: ComponentTypeId,
    },
    ConnectorRecreated,
}

/// A change reported by the monitored system; the subject names the mutated element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeEvent {
    pub kind: ChangeKind,
    pub subject: ElementRef,
    pub time: f64,
}

impl ChangeEvent {
    /// Every element created or modified by this change.
    pub fn touched(&self) -> impl Iterator<Item = ElementRef> {
        let extra = match self.kind {
            ChangeKind::ComponentReplaced { replacement, .. } => {
                Some(ElementRef::Component(replacement))
            }
            _ => None,
        };
        std::iter::once(self.subject).chain(extra)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentType {
    pub id: ComponentTypeId,
    pub name: String,
    pub slot: usize,
    pub reliability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Failure {
    pub id: FailureId,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: ComponentId,
    pub type_id: ComponentTypeId,
    pub slot: usize,
    /// `None` once the component was replaced by another instance.
    pub shop: Option<ShopId>,
    pub state: LifecycleState,
    pub criticality: f64,
    pub failures: Vec<Failure>,
    /// Connectors whose required interface belongs to this component.
    pub required: Vec<ConnectorId>,
    /// Connectors targeting one of this component's provided interfaces.
    pub provided: Vec<ConnectorId>,
}

impl Component {
    pub fn connectivity(&self) -> usize {
        self.required.len() + self.provided.len()
    }

    pub fn connectors(&self) -> impl Iterator<Item = ConnectorId> + '_ {
        self.required.iter().chain(self.provided.iter()).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    pub id: ConnectorId,
    pub shop: ShopId,
    pub source: ComponentId,
    pub target: ComponentId,
    /// Slot of the provided interface the connector binds to.
    pub interface: usize,
    pub state: ConnectorState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shop {
    pub id: ShopId,
    /// Current occupant of each functional slot.
    pub components: Vec<ComponentId>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0} is not eligible for a new failure")]
    TargetNotEligible(ElementRef),
    #[error("{0} is no longer affected by the issue the repair was planned for")]
    StaleMatch(ElementRef),
    #[error("unknown element {0}")]
    UnknownElement(ElementRef),
    #[error("{action} cannot repair {failure}")]
    NotApplicable {
        action: RepairAction,
        failure: FailureKind,
    },
    #[error("{0} is not a valid alternative for the component's slot")]
    InvalidAlternative(ComponentTypeId),
    #[error("{0}")]
    Parse(String),
}

/// Order to repair the issue of `failure` kind on `target` with `action`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairOrder {
    pub action: RepairAction,
    pub failure: FailureKind,
    pub target: ElementRef,
}

/// The architectural runtime model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureModel {
    types: Vec<ComponentType>,
    shops: Vec<Shop>,
    components: Vec<Component>,
    connectors: Vec<Connector>,
    next_failure: u64,
    design_average_u1: f64,
    design_average_weight: f64,
}

impl ArchitectureModel {
    /// Builds `shops` shops of 18 started components each.
    ///
    /// Criticality is drawn uniformly from 1..=10 per component; each slot gets
    /// three alternative component types with distinct reliabilities on the
    /// grid `k/1024` within `[0.5, 1.0]`. Shops start on the first alternative.
    pub fn build(shops: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut types = Vec::with_capacity(SLOTS_PER_SHOP * ALTERNATIVES_PER_SLOT);
        for (slot, name) in SLOT_NAMES.iter().enumerate() {
            let mut grid: Vec<u32> = Vec::with_capacity(ALTERNATIVES_PER_SLOT);
            while grid.len() < ALTERNATIVES_PER_SLOT {
                let k = rng.random_range(RELIABILITY_GRID / 2..=RELIABILITY_GRID);
                if !grid.contains(&k) {
                    grid.push(k);
                }
            }
            for (alt, k) in grid.into_iter().enumerate() {
                types.push(ComponentType {
                    id: ComponentTypeId(types.len() as u32),
                    name: format!("{name} v{}", alt + 1),
                    slot,
                    reliability: k as f64 / RELIABILITY_GRID as f64,
                });
            }
        }

        let mut model = ArchitectureModel {
            types,
            shops: Vec::with_capacity(shops),
            components: Vec::with_capacity(shops * SLOTS_PER_SHOP),
            connectors: Vec::with_capacity(shops * CONNECTOR_TOPOLOGY.len()),
            next_failure: 0,
            design_average_u1: 0.0,
            design_average_weight: 0.0,
        };
        for s in 0..shops {
            let shop_id = ShopId(s as u32);
            let base = model.components.len() as u32;
            let mut members = Vec::with_capacity(SLOTS_PER_SHOP);
            for slot in 0..SLOTS_PER_SHOP {
                let id = ComponentId(base + slot as u32);
                members.push(id);
                let type_id = model.alternatives(slot).next().expect("slot has types");
                model.components.push(Component {
                    id,
                    type_id,
                    slot,
                    shop: Some(shop_id),
                    state: LifecycleState::Started,
                    criticality: rng.random_range(1..=10u32) as f64,
                    failures: Vec::new(),
                    required: Vec::new(),
                    provided: Vec::new(),
                });
            }
            for &(from, to) in CONNECTOR_TOPOLOGY {
                let id = ConnectorId(model.connectors.len() as u32);
                let (source, target) = (members[from], members[to]);
                model.connectors.push(Connector {
                    id,
                    shop: shop_id,
                    source,
                    target,
                    interface: to,
                    state: ConnectorState::Ok,
                });
                model.components[source.index()].required.push(id);
                model.components[target.index()].provided.push(id);
            }
            model.shops.push(Shop {
                id: shop_id,
                components: members,
            });
        }
        model.refresh_design_profile();
        model
    }

    /// Recomputes the architecture-wide averages used as design-time estimates.
    pub fn refresh_design_profile(&mut self) {
        let live: Vec<&Component> = self.components.iter().filter(|c| c.shop.is_some()).collect();
        if live.is_empty() {
            self.design_average_u1 = 0.0;
            self.design_average_weight = 0.0;
            return;
        }
        let n = live.len() as f64;
        let mean = |f: &dyn Fn(&Component) -> f64| live.iter().map(|c| f(c)).sum::<f64>() / n;
        let crit = mean(&|c| c.criticality);
        let rel = mean(&|c| self.types[c.type_id.index()].reliability);
        let conn = mean(&|c| c.connectivity() as f64);
        self.design_average_u1 = crit * rel * conn;
        self.design_average_weight = crit * rel;
    }

    /// Average criticality × reliability × connectivity, fixed at build time.
    pub fn design_average_u1(&self) -> f64 {
        self.design_average_u1
    }

    /// Average criticality × reliability, fixed at build time.
    pub fn design_average_weight(&self) -> f64 {
        self.design_average_weight
    }

    pub fn shops(&self) -> &[Shop] {
        &self.shops
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn connectors(&self) -> &[Connector] {
        &self.connectors
    }

    pub fn component_types(&self) -> &[ComponentType] {
        &self.types
    }

    /// Components currently deployed in a shop.
    pub fn live_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.shop.is_some())
    }

    pub fn live_component_count(&self) -> usize {
        self.shops.len() * SLOTS_PER_SHOP
    }

    pub fn component(&self, id: ComponentId) -> Option<&Component> {
        self.components.get(id.index())
    }

    pub fn connector(&self, id: ConnectorId) -> Option<&Connector> {
        self.connectors.get(id.index())
    }

    pub fn component_type(&self, id: ComponentTypeId) -> Option<&ComponentType> {
        self.types.get(id.index())
    }

    pub fn reliability_of(&self, component: &Component) -> f64 {
        self.types[component.type_id.index()].reliability
    }

    /// Alternative component types implementing `slot`, in catalogue order.
    pub fn alternatives(&self, slot: usize) -> impl Iterator<Item = ComponentTypeId> + '_ {
        self.types.iter().filter(move |t| t.slot == slot).map(|t| t.id)
    }

    /// Overrides a component's criticality; used to pin scenarios.
    pub fn set_criticality(&mut self, id: ComponentId, criticality: f64) -> Result<(), ModelError> {
        assert!(criticality > 0.0, "criticality must be positive");
        let c = self.component_mut(id)?;
        c.criticality = criticality;
        Ok(())
    }

    /// Overrides a component type's reliability; used to pin scenarios.
    pub fn set_type_reliability(&mut self, id: ComponentTypeId, reliability: f64) -> Result<(), ModelError> {
        assert!(reliability > 0.0 && reliability <= 1.0, "reliability must lie in (0, 1]");
        let t = self
            .types
            .get_mut(id.index())
            .ok_or(ModelError::Parse(format!("unknown type {id}")))?;
        t.reliability = reliability;
        Ok(())
    }

    fn component_mut(&mut self, id: ComponentId) -> Result<&mut Component, ModelError> {
        self.components
            .get_mut(id.index())
            .ok_or(ModelError::UnknownElement(ElementRef::Component(id)))
    }

    fn connector_mut(&mut self, id: ConnectorId) -> Result<&mut Connector, ModelError> {
        self.connectors
            .get_mut(id.index())
            .ok_or(ModelError::UnknownElement(ElementRef::Connector(id)))
    }

    /// Whether `target` currently exhibits a failure of `kind`.
    pub fn is_affected(&self, kind: FailureKind, target: ElementRef) -> bool {
        match (kind, target) {
            (FailureKind::Cf4, ElementRef::Connector(id)) => self
                .connector(id)
                .is_some_and(|k| k.state == ConnectorState::Crashed),
            (_, ElementRef::Component(id)) => self.component(id).is_some_and(|c| {
                c.shop.is_some()
                    && match kind {
                        FailureKind::Cf1 => c.state == LifecycleState::Crashed,
                        FailureKind::Cf2 => {
                            c.state == LifecycleState::Started
                                && c.failures.len() >= EXCEPTION_THRESHOLD
                        }
                        FailureKind::Cf3 => c.state == LifecycleState::Removed,
                        FailureKind::Cf4 => false,
                    }
            }),
            _ => false,
        }
    }

    /// Whether a new failure of `kind` may be injected at `target`.
    pub fn is_eligible(&self, kind: FailureKind, target: ElementRef) -> bool {
        match (kind, target) {
            (FailureKind::Cf4, ElementRef::Connector(id)) => self
                .connector(id)
                .is_some_and(|k| k.state == ConnectorState::Ok),
            (FailureKind::Cf4, _) => false,
            (_, ElementRef::Component(id)) => self.component(id).is_some_and(|c| {
                c.shop.is_some() && c.state == LifecycleState::Started && c.failures.is_empty()
            }),
            _ => false,
        }
    }

    /// Resolves a random selector to an eligible target for `kind`.
    ///
    /// The selector picks a candidate; ineligible candidates are re-rolled
    /// deterministically, then the first eligible element after the last roll
    /// is taken. Returns `None` when nothing is eligible.
    pub fn select_target(&self, kind: FailureKind, selector: u64) -> Option<ElementRef> {
        let population = if kind.targets_connector() {
            self.connectors.len()
        } else {
            self.shops.len() * SLOTS_PER_SHOP
        };
        if population == 0 {
            return None;
        }
        let candidate = |i: usize| -> ElementRef {
            if kind.targets_connector() {
                ElementRef::Connector(ConnectorId(i as u32))
            } else {
                let shop = &self.shops[i / SLOTS_PER_SHOP];
                ElementRef::Component(shop.components[i % SLOTS_PER_SHOP])
            }
        };
        let mut roll = selector;
        for _ in 0..64 {
            let c = candidate((roll % population as u64) as usize);
            if self.is_eligible(kind, c) {
                return Some(c);
            }
            roll = splitmix64(roll);
        }
        let start = (roll % population as u64) as usize;
        (0..population)
            .map(|o| candidate((start + o) % population))
            .find(|&c| self.is_eligible(kind, c))
    }

    /// Reflects a failure of `kind` at `target` in the model.
    pub fn inject_failure(
        &mut self,
        kind: FailureKind,
        target: ElementRef,
        time: f64,
    ) -> Result<Vec<ChangeEvent>, ModelError> {
        if !self.is_eligible(kind, target) {
            return Err(ModelError::TargetNotEligible(target));
        }
        let event = |kind| ChangeEvent {
            kind,
            subject: target,
            time,
        };
        match (kind, target) {
            (FailureKind::Cf4, ElementRef::Connector(id)) => {
                self.connector_mut(id)?.state = ConnectorState::Crashed;
                Ok(vec![event(ChangeKind::ConnectorCrashed)])
            }
            (FailureKind::Cf1, ElementRef::Component(id)) => {
                self.component_mut(id)?.state = LifecycleState::Crashed;
                Ok(vec![event(ChangeKind::ComponentCrashed)])
            }
            (FailureKind::Cf3, ElementRef::Component(id)) => {
                self.component_mut(id)?.state = LifecycleState::Removed;
                Ok(vec![event(ChangeKind::ComponentRemoved)])
            }
            (FailureKind::Cf2, ElementRef::Component(id)) => {
                let mut events = Vec::with_capacity(EXCEPTION_THRESHOLD);
                for _ in 0..EXCEPTION_THRESHOLD {
                    let failure = FailureId(self.next_failure);
                    self.next_failure += 1;
                    self.component_mut(id)?.failures.push(Failure { id: failure, time });
                    events.push(event(ChangeKind::ExceptionOccurred { failure }));
                }
                Ok(events)
            }
            _ => Err(ModelError::TargetNotEligible(target)),
        }
    }

    /// Executes a repair. Fails with [`ModelError::StaleMatch`] when the issue is gone.
    pub fn apply_repair(&mut self, order: &RepairOrder, time: f64) -> Result<Vec<ChangeEvent>, ModelError> {
        if !self.is_affected(order.failure, order.target) {
            return Err(ModelError::StaleMatch(order.target));
        }
        if !action_applicable(order.action, order.failure) {
            return Err(ModelError::NotApplicable {
                action: order.action,
                failure: order.failure,
            });
        }
        let subject = order.target;
        let kind = match (order.action, subject) {
            (RepairAction::RecreateConnector, ElementRef::Connector(_)) => ChangeKind::ConnectorRecreated,
            (RepairAction::Restart, ElementRef::Component(_)) => ChangeKind::ComponentRestarted,
            (RepairAction::LwRedeploy, ElementRef::Component(_)) => {
                ChangeKind::ComponentRedeployed { heavy: false }
            }
            (RepairAction::HwRedeploy, ElementRef::Component(_)) => {
                ChangeKind::ComponentRedeployed { heavy: true }
            }
            (RepairAction::Replace { alternative }, ElementRef::Component(id)) => {
                let current = &self.components[id.index()];
                let valid = self
                    .component_type(alternative)
                    .is_some_and(|t| t.slot == current.slot && t.id != current.type_id);
                if !valid {
                    return Err(ModelError::InvalidAlternative(alternative));
                }
                ChangeKind::ComponentReplaced {
                    replacement: ComponentId(self.components.len() as u32),
                    new_type: alternative,
                }
            }
            _ => {
                return Err(ModelError::NotApplicable {
                    action: order.action,
                    failure: order.failure,
                })
            }
        };
        let primary = ChangeEvent { kind, subject, time };
        let mut events = vec![primary];
        if let ChangeKind::ComponentReplaced { .. } = kind {
            // the replacement rewires the component's connectors; crashed ones come back up
            let ElementRef::Component(id) = subject else { unreachable!() };
            for k in self.components[id.index()].connectors() {
                if self.connectors[k.index()].state == ConnectorState::Crashed {
                    events.push(ChangeEvent {
                        kind: ChangeKind::ConnectorRecreated,
                        subject: ElementRef::Connector(k),
                        time,
                    });
                }
            }
        }
        for e in &events {
            self.replay(e)?;
        }
        Ok(events)
    }

    /// Applies a recorded change event to the model.
    pub fn replay(&mut self, event: &ChangeEvent) -> Result<(), ModelError> {
        match (event.kind, event.subject) {
            (ChangeKind::ComponentCrashed, ElementRef::Component(id)) => {
                self.component_mut(id)?.state = LifecycleState::Crashed;
            }
            (ChangeKind::ComponentRemoved, ElementRef::Component(id)) => {
                self.component_mut(id)?.state = LifecycleState::Removed;
            }
            (ChangeKind::ExceptionOccurred { failure }, ElementRef::Component(id)) => {
                self.component_mut(id)?.failures.push(Failure {
                    id: failure,
                    time: event.time,
                });
                self.next_failure = self.next_failure.max(failure.0 + 1);
            }
            (ChangeKind::ConnectorCrashed, ElementRef::Connector(id)) => {
                self.connector_mut(id)?.state = ConnectorState::Crashed;
            }
            (ChangeKind::ConnectorRecreated, ElementRef::Connector(id)) => {
                self.connector_mut(id)?.state = ConnectorState::Ok;
            }
            (
                ChangeKind::ComponentRestarted | ChangeKind::ComponentRedeployed { .. },
                ElementRef::Component(id),
            ) => {
                let c = self.component_mut(id)?;
                // stop (or redeploy), then start again; observed exceptions are destroyed
                c.state = LifecycleState::Deployed;
                c.failures.clear();
                c.state = LifecycleState::Started;
            }
            (ChangeKind::ComponentReplaced { replacement, new_type }, ElementRef::Component(id)) => {
                self.replace_component(id, replacement, new_type)?;
            }
            _ => {
                return Err(ModelError::Parse(format!(
                    "event {:?} does not fit subject {}",
                    event.kind, event.subject
                )))
            }
        }
        Ok(())
    }

    fn replace_component(
        &mut self,
        old: ComponentId,
        replacement: ComponentId,
        new_type: ComponentTypeId,
    ) -> Result<(), ModelError> {
        if replacement.index() != self.components.len() {
            return Err(ModelError::Parse(format!(
                "replacement id {replacement} out of sequence"
            )));
        }
        let prev = self.component_mut(old)?;
        let shop = prev.shop.ok_or(ModelError::StaleMatch(ElementRef::Component(old)))?;
        let required = std::mem::take(&mut prev.required);
        let provided = std::mem::take(&mut prev.provided);
        let (slot, criticality) = (prev.slot, prev.criticality);
        prev.shop = None;
        prev.state = LifecycleState::Undeployed;
        prev.failures.clear();
        for &k in &required {
            self.connectors[k.index()].source = replacement;
        }
        for &k in &provided {
            self.connectors[k.index()].target = replacement;
        }
        self.components.push(Component {
            id: replacement,
            type_id: new_type,
            slot,
            shop: Some(shop),
            state: LifecycleState::Started,
            criticality,
            failures: Vec::new(),
            required,
            provided,
        });
        self.shops[shop.index()].components[slot] = replacement;
        Ok(())
    }

    /// Line-oriented text snapshot: one element per line.
    pub fn snapshot(&self) -> String {
        snapshot::write_snapshot(self)
    }

    pub(crate) fn from_parts(
        types: Vec<ComponentType>,
        shops: Vec<Shop>,
        components: Vec<Component>,
        connectors: Vec<Connector>,
        next_failure: u64,
    ) -> Self {
        let mut model = ArchitectureModel {
            types,
            shops,
            components,
            connectors,
            next_failure,
            design_average_u1: 0.0,
            design_average_weight: 0.0,
        };
        model.refresh_design_profile();
        model
    }
}

/// Which repair actions may handle which failure kinds.
pub fn action_applicable(action: RepairAction, failure: FailureKind) -> bool {
    use FailureKind::*;
    match action {
        RepairAction::Restart | RepairAction::LwRedeploy => matches!(failure, Cf1 | Cf2),
        RepairAction::HwRedeploy | RepairAction::Replace { .. } => matches!(failure, Cf1 | Cf2 | Cf3),
        RepairAction::RecreateConnector => failure == Cf4,
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
