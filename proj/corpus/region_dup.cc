#ext regions
-- The pointer parameter mentions x contravariantly.
main /\[Y <: {*} Top] \(x: {*} Region) \(y: {x} Ptr[Y]) new x [Y] (!y)
