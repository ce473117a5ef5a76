#pragma once

#include <stdexcept>
#include <string>

namespace fisheye {

// Error categories map to CLI exit codes: data errors exit 2, numeric failures exit 3.
class Error : public std::runtime_error {
public:
    enum class Category { data = 2, numeric = 3 };

    Error(Category c, const std::string& msg) : std::runtime_error(msg), category_(c) {}
    Category category() const { return category_; }

private:
    Category category_;
};

struct DegenerateInput : Error { explicit DegenerateInput(const std::string& m) : Error(Category::data, m) {} };
struct DegeneratePoint : Error { explicit DegeneratePoint(const std::string& m) : Error(Category::data, m) {} };
struct FieldAngleExceeded : Error { explicit FieldAngleExceeded(const std::string& m) : Error(Category::data, m) {} };
struct Unrepresentable : Error { explicit Unrepresentable(const std::string& m) : Error(Category::numeric, m) {} };
struct FitDiverged : Error { explicit FitDiverged(const std::string& m) : Error(Category::numeric, m) {} };
struct DimensionMismatch : Error { explicit DimensionMismatch(const std::string& m) : Error(Category::data, m) {} };
struct BothEmpty : Error { explicit BothEmpty(const std::string& m) : Error(Category::data, m) {} };
struct NonConvexInput : Error { explicit NonConvexInput(const std::string& m) : Error(Category::data, m) {} };
struct OutOfBounds : Error { explicit OutOfBounds(const std::string& m) : Error(Category::data, m) {} };
struct CentroidOutside : Error { explicit CentroidOutside(const std::string& m) : Error(Category::data, m) {} };
struct CenterOutOfImage : Error { explicit CenterOutOfImage(const std::string& m) : Error(Category::data, m) {} };
struct AngleOutOfRange : Error { explicit AngleOutOfRange(const std::string& m) : Error(Category::data, m) {} };
struct NonFiniteInput : Error { explicit NonFiniteInput(const std::string& m) : Error(Category::numeric, m) {} };
struct ParseError : Error { explicit ParseError(const std::string& m) : Error(Category::data, m) {} };
struct SchemaError : Error { explicit SchemaError(const std::string& m) : Error(Category::data, m) {} };
struct InvalidContour : Error { explicit InvalidContour(const std::string& m) : Error(Category::data, m) {} };
struct PlacementFailed : Error { explicit PlacementFailed(const std::string& m) : Error(Category::numeric, m) {} };

}  // namespace fisheye
