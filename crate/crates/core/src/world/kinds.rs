//! Object vocabulary shared by scenes, the dialogue generator and the
//! scripted provider.

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Food,
    Container,
    Device,
    Utensil,
    /// Surfaces: things are put *on* them.
    Furniture,
    /// Enclosures and appliances: things are put *in* them.
    Receptacle,
    Light,
    /// Portable household items with no functional role.
    Item,
}

impl Category {
    /// Whether instances of this category are scene receptacles rather than objects.
    pub fn is_receptacle(self) -> bool {
        matches!(self, Category::Furniture | Category::Receptacle)
    }
}

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
    pub struct Properties: u8 {
        const PICKUPABLE = 1;
        const OPENABLE = 1 << 1;
        const TOGGLEABLE = 1 << 2;
        const SLICEABLE = 1 << 3;
        const HEAT_SOURCE = 1 << 4;
        const COOL_SOURCE = 1 << 5;
        const CLEAN_SOURCE = 1 << 6;
    }
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectKind {
    pub name: &'static str,
    pub category: Category,
    pub properties: Properties,
    /// Lowercase singular noun used in dialogue ("counter top").
    pub noun: &'static str,
    pub plural: &'static str,
    /// Extra surface forms that refer to this kind ("refrigerator").
    pub aliases: &'static [&'static str],
}

impl ObjectKind {
    pub fn has(&self, p: Properties) -> bool {
        self.properties.contains(p)
    }

    pub fn is_receptacle(&self) -> bool {
        self.category.is_receptacle()
    }

    /// All lowercase surface forms, longest first so multi-word forms win.
    pub fn surface_forms(&self) -> Vec<&'static str> {
        let mut forms = vec![self.noun, self.plural];
        forms.extend_from_slice(self.aliases);
        forms.sort_by_key(|f| std::cmp::Reverse(f.len()));
        forms.dedup();
        forms
    }
}

const P: Properties = Properties::PICKUPABLE;
const PS: Properties = Properties::PICKUPABLE.union(Properties::SLICEABLE);
const NONE: Properties = Properties::empty();
const OPEN: Properties = Properties::OPENABLE;

macro_rules! kind {
    ($name:literal, $cat:ident, $props:expr, $noun:literal, $plural:literal $(, $alias:literal)*) => {
        ObjectKind {
            name: $name,
            category: Category::$cat,
            properties: $props,
            noun: $noun,
            plural: $plural,
            aliases: &[$($alias),*],
        }
    };
}

pub static VOCABULARY: &[ObjectKind] = &[
    kind!("Apple", Food, PS, "apple", "apples"),
    kind!("Tomato", Food, PS, "tomato", "tomatoes"),
    kind!("Potato", Food, PS, "potato", "potatoes"),
    kind!("Lettuce", Food, PS, "lettuce", "lettuces"),
    kind!("Bread", Food, PS, "bread", "breads"),
    kind!("Egg", Food, P, "egg", "eggs"),
    kind!("Mug", Container, P, "mug", "mugs"),
    kind!("Cup", Container, P, "cup", "cups"),
    kind!("Bowl", Container, P, "bowl", "bowls"),
    kind!("Pot", Container, P, "pot", "pots"),
    kind!("Plate", Container, P, "plate", "plates"),
    kind!("Box", Container, P, "box", "boxes"),
    kind!("Vase", Container, P, "vase", "vases"),
    kind!("CellPhone", Device, P, "cell phone", "cell phones", "phone", "phones"),
    kind!("Laptop", Device, P, "laptop", "laptops"),
    kind!("RemoteControl", Device, P, "remote control", "remote controls", "remote"),
    kind!("Watch", Device, P, "watch", "watches"),
    kind!("KeyChain", Device, P, "key chain", "key chains", "keys"),
    kind!("AlarmClock", Device, P, "alarm clock", "alarm clocks"),
    kind!("ButterKnife", Utensil, P, "butter knife", "butter knives"),
    kind!("Knife", Utensil, P, "knife", "knives"),
    kind!("Fork", Utensil, P, "fork", "forks"),
    kind!("Spoon", Utensil, P, "spoon", "spoons"),
    kind!("Book", Item, P, "book", "books"),
    kind!("Pillow", Item, P, "pillow", "pillows"),
    kind!("Candle", Item, P, "candle", "candles"),
    kind!("Statue", Item, P, "statue", "statues"),
    kind!("TeddyBear", Item, P, "teddy bear", "teddy bears"),
    kind!("DeskLamp", Light, Properties::TOGGLEABLE, "desk lamp", "desk lamps", "lamp"),
    kind!("FloorLamp", Light, Properties::TOGGLEABLE, "floor lamp", "floor lamps", "lamp"),
    kind!("CounterTop", Furniture, NONE, "counter top", "counter tops", "countertop", "counter"),
    kind!("DiningTable", Furniture, NONE, "dining table", "dining tables"),
    kind!("CoffeeTable", Furniture, NONE, "coffee table", "coffee tables"),
    kind!("SideTable", Furniture, NONE, "side table", "side tables"),
    kind!("Desk", Furniture, NONE, "desk", "desks"),
    kind!("Shelf", Furniture, NONE, "shelf", "shelves"),
    kind!("Dresser", Furniture, NONE, "dresser", "dressers"),
    kind!("Sofa", Furniture, NONE, "sofa", "sofas"),
    kind!("Bed", Furniture, NONE, "bed", "beds"),
    kind!("ArmChair", Furniture, NONE, "arm chair", "arm chairs", "armchair"),
    kind!(
        "Fridge",
        Receptacle,
        OPEN.union(Properties::COOL_SOURCE),
        "fridge",
        "fridges",
        "refrigerator"
    ),
    kind!(
        "Microwave",
        Receptacle,
        OPEN.union(Properties::HEAT_SOURCE),
        "microwave",
        "microwaves"
    ),
    kind!(
        "SinkBasin",
        Receptacle,
        Properties::CLEAN_SOURCE,
        "sink basin",
        "sink basins",
        "sink"
    ),
    kind!("Cabinet", Receptacle, OPEN, "cabinet", "cabinets"),
    kind!("Drawer", Receptacle, OPEN, "drawer", "drawers"),
    kind!("GarbageCan", Receptacle, NONE, "garbage can", "garbage cans"),
];

/// Looks up a kind by its canonical name (`"CounterTop"`).
pub fn kind_by_name(name: &str) -> Option<&'static ObjectKind> {
    VOCABULARY.iter().find(|k| k.name == name)
}

/// All kinds that a lowercase surface form may denote ("lamp" is ambiguous).
pub fn kinds_for_surface(surface: &str) -> Vec<&'static ObjectKind> {
    let s = surface.to_ascii_lowercase();
    VOCABULARY
        .iter()
        .filter(|k| k.noun == s || k.plural == s || k.aliases.contains(&s.as_str()))
        .collect()
}
