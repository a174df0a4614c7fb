//! Fixed per-shop layout: the 18 functional slots and the connectors wiring them.
//!
//! Every shop instantiates the same slots and the same connector topology, so a
//! component's connectivity depends only on its slot.

/// Number of functional slots (and thus components) per shop.
pub const SLOTS_PER_SHOP: usize = 18;

/// Alternative component types available for every slot.
pub const ALTERNATIVES_PER_SLOT: usize = 3;

pub const SLOT_NAMES: [&str; SLOTS_PER_SHOP] = [
    "Authentication Service",
    "Bid and Buy Service",
    "Buy Now Item Filter",
    "Category Item Filter",
    "Comment Item Filter",
    "Future Sales Item Filter",
    "Inventory Service",
    "Item Management Service",
    "Last Second Sales Item Filter",
    "Past Sales Item Filter",
    "Persistence Service",
    "Query Service",
    "Recommendation Item Filter",
    "Region Item Filter",
    "Reputation Service",
    "Seller Reputation Item Filter",
    "User Management Service",
    "Review Service",
];

/// Directed connectors as `(requiring slot, providing slot)`.
pub const CONNECTOR_TOPOLOGY: &[(usize, usize)] = &[
    // persistence consumers
    (0, 10),
    (1, 10),
    (6, 10),
    (7, 10),
    (14, 10),
    (16, 10),
    // item filter pipeline
    (11, 3),
    (3, 13),
    (13, 2),
    (2, 8),
    (8, 9),
    (9, 5),
    (5, 15),
    (15, 12),
    (12, 4),
    (4, 11),
    // services
    (1, 0),
    (1, 6),
    (1, 14),
    (7, 6),
    (11, 7),
    (16, 0),
    (17, 14),
    (17, 16),
    (15, 14),
];

/// Number of connectors attached to a slot in the fixed topology.
pub fn slot_degree(slot: usize) -> usize {
    CONNECTOR_TOPOLOGY
        .iter()
        .filter(|(s, t)| *s == slot || *t == slot)
        .count()
}
