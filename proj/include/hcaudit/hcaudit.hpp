#pragma once

#include <hcaudit/cell_address.hpp>
#include <hcaudit/config.hpp>
#include <hcaudit/detection.hpp>
#include <hcaudit/errors.hpp>
#include <hcaudit/json_io.hpp>
#include <hcaudit/lexer.hpp>
#include <hcaudit/reporting.hpp>
#include <hcaudit/workbook.hpp>
#include <hcaudit/xlsx.hpp>
