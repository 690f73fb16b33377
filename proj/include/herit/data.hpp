#pragma once

#include <string>
#include <vector>

#include "herit/likelihood.hpp"

namespace herit {

struct TwinRecord {
  double y1 = 0.0;
  double y2 = 0.0;
  bool mz = false;
};

/// Twin pairs as read from file, plus the count of rows that were dropped
/// because a field was missing or not numeric.
struct TwinDataset {
  std::vector<TwinRecord> records;
  long dropped = 0;

  TwinData to_matrices() const;
};

struct TrioRecord {
  double mother = 0.0;
  double father = 0.0;
  double child = 0.0;
};

struct TrioDataset {
  std::vector<TrioRecord> records;
  long dropped = 0;
  bool standardized = false;
  double shift = 0.0;  // the D applied to the parental traits

  TrioData to_matrices() const;
};

/// Reads a header-bearing CSV with columns y1, y2, zygosity (MZ/DZ,
/// case-insensitive; column order free, extra columns ignored). Rows with a
/// missing or non-numeric field are dropped and counted. Throws data_error
/// when a required column is missing or no usable rows remain.
TwinDataset read_twins(const std::string& path);

/// Same contract for columns mother, father, child.
TrioDataset read_trios(const std::string& path);

/// Balances the parental means: with D = (mean(mother) - mean(father)) / 2,
/// mothers shift by -D and fathers by +D; children are untouched. D is kept
/// in the result's metadata.
TrioDataset standardize_trios(TrioDataset data);

}  // namespace herit
