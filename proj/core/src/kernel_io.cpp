#include "voltra/kernel_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace voltra {

void save_kernel_csv(const KernelOperator& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const Eigen::MatrixXd& k = a.kernel();
    char buf[40];
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", k(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

Eigen::MatrixXd load_dense_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            size_t pos = 0;
            double v;
            try {
                v = std::stod(field, &pos);
            } catch (const std::exception&) {
                throw IoError("non-numeric field '" + field + "' in '" + path + "' line " +
                              std::to_string(lineno));
            }
            while (pos < field.size() && std::isspace((unsigned char)field[pos])) ++pos;
            if (pos != field.size())
                throw IoError("trailing junk in field '" + field + "' in '" + path + "' line " +
                              std::to_string(lineno));
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("ragged CSV: line " + std::to_string(lineno) + " of '" + path +
                          "' has " + std::to_string(row.size()) + " fields, expected " +
                          std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("'" + path + "' holds no data rows");
    if (rows.size() != rows.front().size())
        throw IoError("'" + path + "' is " + std::to_string(rows.size()) + "x" +
                      std::to_string(rows.front().size()) + ", expected a square matrix");
    Eigen::MatrixXd m(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    return m;
}

KernelOperator load_kernel_csv(const std::string& path, const Grid& grid, EntryMode mode) {
    Eigen::MatrixXd m = load_dense_csv(path);
    if (m.rows() != grid.size())
        throw IoError("'" + path + "' is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + " but the grid has " +
                      std::to_string(grid.size()) + " nodes");
    if (!check_triangular(m))
        throw IoError("'" + path + "' is not strictly lower triangular");
    return KernelOperator(grid, std::move(m), mode);
}

}  // namespace voltra
