module.exports = function notFound(request, response) {
  response.statusCode = 404;
  response.end('Cannot find ' + request.url);
};

// expect: ApiParam request 1 notFound XSS 3
// expect: ApiParam response 1 notFound None -
// expect: ParamProperty url 3 notFound XSS 3
