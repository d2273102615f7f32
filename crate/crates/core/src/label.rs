use core::fmt;

/// Index of a simple object in a category's ordered label list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub usize);

impl Label {
    pub const fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for Label {
    fn from(i: usize) -> Self {
        Label(i)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
