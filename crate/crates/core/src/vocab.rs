//! Fixed vocabularies shared by the planner, executor and reasoner backends.

/// Object categories the agent may reference, in canonical order.
pub const CATEGORIES: &[&str] = &[
    "Cabinet", "CounterTop", "Sink", "Towel", "HandTowel", "TowelHolder", "SoapBar", "ToiletPaper",
    "ToiletPaperHanger", "HandTowelHolder", "SoapBottle", "GarbageCan", "Candle", "ScrubBrush",
    "Plunger", "SinkBasin", "Cloth", "SprayBottle", "Toilet", "Faucet", "ShowerHead", "Box",
    "Bed", "Book", "DeskLamp", "BasketBall", "Pen", "Pillow", "Pencil", "CellPhone", "KeyChain",
    "Painting", "CreditCard", "AlarmClock", "CD", "Laptop", "Drawer", "SideTable", "Chair",
    "Blinds", "Desk", "Curtains", "Dresser", "Watch", "Television", "WateringCan", "Newspaper",
    "FloorLamp", "RemoteControl", "HousePlant", "Statue", "Ottoman", "ArmChair", "Sofa",
    "DogBed", "BaseballBat", "TennisRacket", "VacuumCleaner", "Mug", "ShelvingUnit", "Shelf",
    "StoveBurner", "Apple", "Lettuce", "Bottle", "Egg", "Microwave", "CoffeeMachine", "Fork",
    "Fridge", "WineBottle", "Spatula", "Bread", "Tomato", "Pan", "Cup", "Pot", "SaltShaker",
    "Potato", "PepperShaker", "ButterKnife", "StoveKnob", "Toaster", "DishSponge", "Spoon",
    "Plate", "Knife", "DiningTable", "Bowl", "LaundryHamper", "Vase", "Stool", "CoffeeTable",
    "Poster", "Bathtub", "TissueBox", "Footstool", "BathtubBasin", "ShowerCurtain", "TVStand",
    "Boots", "RoomDecor", "PaperTowelRoll", "Ladle", "Kettle", "Safe", "GarbageBag", "TeddyBear",
    "TableTopDecor", "Dumbbell", "Desktop", "AluminumFoil", "Window", "LightSwitch", "AppleSliced",
    "BreadSliced", "LettuceSliced", "PotatoSliced", "TomatoSliced", "Mirror", "ShowerDoor",
    "ShowerGlass", "Floor",
];

/// Look up a category by exact name.
pub fn is_category(name: &str) -> bool {
    CATEGORIES.contains(&name)
}

/// Case-insensitive lookup returning the canonical spelling.
pub fn canonical_category(name: &str) -> Option<&'static str> {
    CATEGORIES
        .iter()
        .copied()
        .find(|c| c.eq_ignore_ascii_case(name.trim()))
}

/// Category prefix of an instance id such as `Mug_1`; bare categories pass through.
pub fn category_of(reference: &str) -> &str {
    match reference.rsplit_once('_') {
        Some((head, tail)) if !head.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) && !tail.is_empty() => head,
        _ => reference,
    }
}

/// True when `reference` looks like `<Category>_<k>`.
pub fn is_instance_id(reference: &str) -> bool {
    category_of(reference) != reference
}

/// Sliced counterpart of a sliceable category.
pub fn sliced_category(category: &str) -> Option<&'static str> {
    match category {
        "Apple" => Some("AppleSliced"),
        "Bread" => Some("BreadSliced"),
        "Lettuce" => Some("LettuceSliced"),
        "Potato" => Some("PotatoSliced"),
        "Tomato" => Some("TomatoSliced"),
        _ => None,
    }
}

/// Whole-object category a sliced category was cut from.
pub fn whole_category(sliced: &str) -> Option<&'static str> {
    match sliced {
        "AppleSliced" => Some("Apple"),
        "BreadSliced" => Some("Bread"),
        "LettuceSliced" => Some("Lettuce"),
        "PotatoSliced" => Some("Potato"),
        "TomatoSliced" => Some("Tomato"),
        _ => None,
    }
}

/// Default affordances per category. World specs may override any flag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Affordances {
    #[serde(default)]
    pub pickupable: bool,
    #[serde(default)]
    pub receptacle: bool,
    #[serde(default)]
    pub openable: bool,
    #[serde(default)]
    pub toggleable: bool,
    #[serde(default)]
    pub sliceable: bool,
    #[serde(default)]
    pub fillable: bool,
    #[serde(default)]
    pub cookable: bool,
    /// Carries an `is_clean` state that can be dirty.
    #[serde(default)]
    pub dirtyable: bool,
}

pub fn default_affordances(category: &str) -> Affordances {
    let mut a = Affordances::default();
    match category {
        "Mug" | "Cup" => {
            a.pickupable = true;
            a.receptacle = true;
            a.fillable = true;
            a.dirtyable = true;
        }
        "Bowl" | "Pot" | "Kettle" | "WateringCan" => {
            a.pickupable = true;
            a.receptacle = true;
            a.fillable = true;
            a.dirtyable = category != "WateringCan" && category != "Kettle";
        }
        "Plate" | "Pan" => {
            a.pickupable = true;
            a.receptacle = true;
            a.dirtyable = true;
        }
        "Bottle" | "WineBottle" | "Vase" => {
            a.pickupable = true;
            a.fillable = true;
        }
        "HousePlant" => {
            a.fillable = true;
        }
        "Apple" | "Bread" | "Lettuce" | "Tomato" => {
            a.pickupable = true;
            a.sliceable = true;
        }
        "Potato" => {
            a.pickupable = true;
            a.sliceable = true;
            a.cookable = true;
        }
        "Egg" => {
            a.pickupable = true;
            a.cookable = true;
        }
        "BreadSliced" | "PotatoSliced" => {
            a.pickupable = true;
            a.cookable = true;
        }
        "AppleSliced" | "LettuceSliced" | "TomatoSliced" => {
            a.pickupable = true;
        }
        "Fridge" | "Cabinet" | "Drawer" | "Safe" => {
            a.receptacle = true;
            a.openable = true;
        }
        "Box" => {
            a.pickupable = true;
            a.receptacle = true;
            a.openable = true;
        }
        "Microwave" => {
            a.receptacle = true;
            a.openable = true;
            a.toggleable = true;
        }
        "Laptop" => {
            a.pickupable = true;
            a.openable = true;
            a.toggleable = true;
        }
        "CoffeeMachine" | "Toaster" | "StoveBurner" => {
            a.receptacle = true;
            a.toggleable = true;
        }
        "Faucet" | "ShowerHead" | "DeskLamp" | "FloorLamp" | "LightSwitch" | "Television"
        | "StoveKnob" => {
            a.toggleable = true;
        }
        "Sink" | "SinkBasin" | "CounterTop" | "DiningTable" | "SideTable" | "CoffeeTable"
        | "Desk" | "Dresser" | "Shelf" | "ShelvingUnit" | "TVStand" | "Chair" | "ArmChair"
        | "Sofa" | "Bed" | "Stool" | "Ottoman" | "GarbageCan" | "Bathtub" | "BathtubBasin"
        | "Toilet" | "LaundryHamper" | "TowelHolder" | "HandTowelHolder"
        | "ToiletPaperHanger" | "DogBed" | "Footstool" => {
            a.receptacle = true;
        }
        "Floor" | "Window" | "Mirror" | "Painting" | "Poster" | "Blinds" | "Curtains"
        | "ShowerDoor" | "ShowerGlass" | "ShowerCurtain" => {}
        _ => {
            a.pickupable = true;
        }
    }
    if matches!(category, "Knife" | "ButterKnife" | "Fork" | "Spoon" | "Spatula" | "Ladle") {
        a.pickupable = true;
    }
    a
}

/// Default receptacle capacity per category.
pub fn default_capacity(category: &str) -> usize {
    match category {
        "CoffeeMachine" | "StoveBurner" | "Toaster" => 1,
        "Microwave" => 2,
        "Sink" | "SinkBasin" => 5,
        "Fridge" => 6,
        "Cabinet" | "Drawer" => 4,
        "CounterTop" => 10,
        "DiningTable" | "CoffeeTable" | "Desk" | "Dresser" | "Bed" | "Sofa" => 8,
        "Plate" | "Bowl" => 4,
        _ => 3,
    }
}

/// Receptacles suitable for putting a held object down out of the way.
pub fn is_surface(category: &str) -> bool {
    matches!(
        category,
        "CounterTop"
            | "DiningTable"
            | "SideTable"
            | "CoffeeTable"
            | "Desk"
            | "Dresser"
            | "Shelf"
            | "ShelvingUnit"
            | "TVStand"
            | "Chair"
            | "ArmChair"
            | "Sofa"
            | "Bed"
            | "Stool"
            | "Ottoman"
    )
}

/// Implements usable for slicing.
pub fn is_knife(category: &str) -> bool {
    matches!(category, "Knife" | "ButterKnife")
}

/// Water sources that can be toggled to run water into a basin.
pub fn is_water_basin(category: &str) -> bool {
    matches!(category, "Sink" | "SinkBasin")
}
